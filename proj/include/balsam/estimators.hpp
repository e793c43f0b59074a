#pragma once

// Narain-Horvitz-Thompson total estimator, its design variance, and the two
// unbiased variance estimators (general and fixed-size Sen-Yates-Grundy).

#include <vector>

#include "balsam/common.hpp"
#include "balsam/population.hpp"

namespace balsam {

enum class VarianceMode { General, FixedSize };

namespace detail {

inline std::vector<char> domain_mask(int N, const std::vector<int>* domain) {
  std::vector<char> mask(N, domain == nullptr ? 1 : 0);
  if (domain != nullptr)
    for (int u : *domain) {
      require(u >= 0 && u < N, Errc::BadInput, "domain unit out of range");
      mask[u] = 1;
    }
  return mask;
}

}  // namespace detail

// Point estimate of the y-total over an optional domain: sum of y/pi over the
// sampled units of the domain.
inline double nht_estimate(const Population& pop, const Sample& sample,
                           const std::vector<double>& y,
                           const std::vector<int>* domain = nullptr) {
  const int N = pop.size();
  require(static_cast<int>(y.size()) == N, Errc::DimensionMismatch,
          "study variable length does not match population");
  auto mask = detail::domain_mask(N, domain);
  double total = 0.0;
  for (int u : sample.units) {
    require(u >= 0 && u < N, Errc::BadInput, "sampled unit out of range");
    if (!mask[u]) continue;
    require(pop.pi[u] > 0.0, Errc::ZeroProbabilityMember,
            "unit " + std::to_string(u + 1) + " has zero inclusion probability");
    total += y[u] / pop.pi[u];
  }
  return total;
}

// Design variance of the NHT total over a domain: the double sum of
// (y_l/pi_l)(y_k/pi_k)(pi_lk - pi_l pi_k). A population quantity, not an
// estimate; needs the full joint-inclusion matrix.
inline double ht_variance(const Population& pop, const JointInclusionMatrix& joint,
                          const std::vector<double>& y,
                          const std::vector<int>* domain = nullptr) {
  const int N = pop.size();
  require(static_cast<int>(y.size()) == N, Errc::DimensionMismatch,
          "study variable length does not match population");
  require(joint.n == N, Errc::DimensionMismatch, "joint matrix size does not match population");
  auto mask = detail::domain_mask(N, domain);
  double acc = 0.0;
  for (int l = 0; l < N; ++l) {
    if (!mask[l]) continue;
    const double el = y[l] / pop.pi[l];
    for (int k = 0; k < N; ++k) {
      if (!mask[k]) continue;
      const double ek = y[k] / pop.pi[k];
      acc += el * ek * (joint.at(l, k) - pop.pi[l] * pop.pi[k]);
    }
  }
  return acc;
}

// Unbiased variance estimators from one drawn sample.
//   General: sum over sampled pairs of (y_l/pi_l)(y_k/pi_k)(pi_lk - pi_l pi_k)/pi_lk.
//   FixedSize: the Sen-Yates-Grundy form, valid when the design has fixed size;
//   zero whenever y is proportional to pi.
// Any needed pair with pi_lk = 0 makes the design non-measurable here.
inline double ht_variance_estimate(const Sample& sample, const Population& pop,
                                   const JointInclusionMatrix& joint,
                                   const std::vector<double>& y, VarianceMode mode) {
  const int N = pop.size();
  require(static_cast<int>(y.size()) == N, Errc::DimensionMismatch,
          "study variable length does not match population");
  require(joint.n == N, Errc::DimensionMismatch, "joint matrix size does not match population");
  require(!sample.units.empty(), Errc::EmptySample, "variance estimate needs a non-empty sample");

  const auto& s = sample.units;
  const int m = static_cast<int>(s.size());
  auto joint_at = [&](int l, int k) {
    double plk = joint.at(l, k);
    require(plk > 0.0, Errc::ZeroJointProbability,
            "units " + std::to_string(l + 1) + "," + std::to_string(k + 1) +
                " never co-occur; estimator undefined");
    return plk;
  };

  double acc = 0.0;
  if (mode == VarianceMode::General) {
    for (int a = 0; a < m; ++a) {
      const int l = s[a];
      const double el = y[l] / pop.pi[l];
      for (int b = 0; b < m; ++b) {
        const int k = s[b];
        const double ek = y[k] / pop.pi[k];
        const double plk = joint_at(l, k);
        acc += el * ek * (plk - pop.pi[l] * pop.pi[k]) / plk;
      }
    }
  } else {
    for (int a = 0; a < m; ++a) {
      const int l = s[a];
      const double el = y[l] / pop.pi[l];
      for (int b = a + 1; b < m; ++b) {
        const int k = s[b];
        const double ek = y[k] / pop.pi[k];
        const double plk = joint_at(l, k);
        const double diff = el - ek;
        acc += diff * diff * (pop.pi[l] * pop.pi[k] - plk) / plk;
      }
    }
  }
  return acc;
}

}  // namespace balsam

#pragma once

// Spatial balance measures for a realized sample: a Moran-type index on the
// sample indicator over k-nearest-neighbor weights, a Voronoi index on the
// selection probabilities, and a balanced Voronoi index on auxiliary columns.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "balsam/common.hpp"
#include "balsam/population.hpp"

namespace balsam {

struct SpatialWeights {
  int N = 0;
  int k = 0;
  // directed adjacency: nbr[i] holds (j, w_ij); symmetric by construction
  std::vector<std::vector<std::pair<int, double>>> nbr;
  double total = 0.0;  // sum of all w_ij
};

// Symmetric k-nearest-neighbor weights with w_ij = 1/d_ij. Neighbor ties are
// broken toward the lower unit id and k is clamped to N-1.
inline SpatialWeights build_weights(const Coords& coords, int k) {
  const int N = coords.size();
  require(N >= 2, Errc::BadInput, "need at least two units for spatial weights");
  k = std::clamp(k, 1, N - 1);

  SpatialWeights W;
  W.N = N;
  W.k = k;
  W.nbr.resize(N);

  std::vector<std::vector<char>> edge(N, std::vector<char>(N, 0));
  std::vector<std::pair<double, int>> cand(N - 1);
  for (int i = 0; i < N; ++i) {
    int m = 0;
    for (int j = 0; j < N; ++j)
      if (j != i) cand[m++] = {euclid(coords.row(i), coords.row(j), coords.dim), j};
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (int t = 0; t < k; ++t) {
      int j = cand[t].second;
      edge[i][j] = edge[j][i] = 1;
    }
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (edge[i][j]) {
        double d = euclid(coords.row(i), coords.row(j), coords.dim);
        require(d > 1e-12, Errc::CoincidentNeighbors,
                "units " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                    " are coincident");
        W.nbr[i].push_back({j, 1.0 / d});
        W.total += 1.0 / d;
      }
  return W;
}

// k chosen so each unit's neighborhood roughly matches one sample stratum.
inline SpatialWeights build_weights_for_design(const Coords& coords, int n) {
  const int N = coords.size();
  int k = static_cast<int>(std::llround(static_cast<double>(N) / n)) - 1;
  return build_weights(coords, std::max(1, k));
}

// Moran-type autocorrelation of the sample indicator, centered at n/N and
// scaled by N so the magnitude is comparable across population sizes.
inline double moran_index(const SpatialWeights& W, const std::vector<int>& sample_units) {
  const int N = W.N;
  const int n = static_cast<int>(sample_units.size());
  require(n >= 1 && n < N, Errc::DegenerateSample, "sample must be a proper nonempty subset");
  std::vector<double> z(N, -static_cast<double>(n) / N);
  for (int u : sample_units) {
    require(u >= 0 && u < N, Errc::BadInput, "sample unit out of range");
    z[u] += 1.0;
  }
  double num = 0.0, zz = 0.0;
  for (int i = 0; i < N; ++i) {
    zz += z[i] * z[i];
    for (auto [j, w] : W.nbr[i]) num += w * z[i] * z[j];
  }
  require(W.total > 0.0 && zz > 0.0, Errc::DegenerateSample, "degenerate weights or indicator");
  return static_cast<double>(N) * num / (W.total * zz);
}

// Nearest sampled unit for every unit; distance ties go to the lowest sampled id.
inline std::vector<int> voronoi_cells(const Coords& coords, const std::vector<int>& sample_units) {
  const int N = coords.size();
  require(!sample_units.empty(), Errc::EmptySample, "no sampled units");
  std::vector<int> sorted = sample_units;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> cell(N, -1);
  for (int i = 0; i < N; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int s : sorted) {
      double d = euclid(coords.row(i), coords.row(s), coords.dim);
      if (d < best) {
        best = d;
        cell[i] = s;
      }
    }
  }
  return cell;
}

// Voronoi balance: n times the sum over sampled units of the squared gap
// between the estimated and true probability share of their cell.
inline double voronoi_index(const Population& pop, const std::vector<int>& sample_units) {
  const int N = pop.size();
  const int n_pop = validate_population(pop);
  const int n = static_cast<int>(sample_units.size());
  require(n == n_pop, Errc::CardinalityMismatch, "sample size must match the design size");
  std::vector<int> cell = voronoi_cells(pop.coords, sample_units);

  std::vector<char> in_sample(N, 0);
  for (int u : sample_units) in_sample[u] = 1;
  double total = 0.0;
  std::vector<int> sorted = sample_units;
  std::sort(sorted.begin(), sorted.end());
  for (int s : sorted) {
    double g = 0.0, ghat = 0.0;
    for (int i = 0; i < N; ++i)
      if (cell[i] == s) {
        g += pop.pi[i];
        if (in_sample[i]) ghat += 1.0;  // pi_i / pi_i
      }
    g /= n_pop;
    ghat /= n_pop;
    total += (ghat - g) * (ghat - g);
  }
  return n * total;
}

namespace detail {

// Solve Q x = b for symmetric positive definite Q via LDL^T; throws on
// (near-)singular input.
inline std::vector<double> solve_spd(std::vector<std::vector<double>> Q, std::vector<double> b) {
  const int p = static_cast<int>(Q.size());
  double scale = 0.0;
  for (int i = 0; i < p; ++i) scale = std::max(scale, std::abs(Q[i][i]));
  if (scale == 0.0) scale = 1.0;
  std::vector<double> D(p, 0.0);
  // in-place lower factor in Q
  for (int j = 0; j < p; ++j) {
    double d = Q[j][j];
    for (int k = 0; k < j; ++k) d -= Q[j][k] * Q[j][k] * D[k];
    require(std::abs(d) > 1e-12 * scale, Errc::SingularQ, "balance metric is singular");
    D[j] = d;
    for (int i = j + 1; i < p; ++i) {
      double v = Q[i][j];
      for (int k = 0; k < j; ++k) v -= Q[i][k] * Q[j][k] * D[k];
      Q[i][j] = v / d;
    }
  }
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < i; ++k) b[i] -= Q[i][k] * b[k];
  for (int i = 0; i < p; ++i) b[i] /= D[i];
  for (int i = p - 1; i >= 0; --i)
    for (int k = i + 1; k < p; ++k) b[i] -= Q[k][i] * b[k];
  return b;
}

}  // namespace detail

struct QSpec {
  enum Kind { Identity, Gram } kind = Gram;
};

// Intercept plus coordinates: the default balancing columns.
inline std::vector<std::vector<double>> default_balance_columns(const Population& pop) {
  const int N = pop.size();
  std::vector<std::vector<double>> cols(1 + pop.dim(), std::vector<double>(N));
  for (int i = 0; i < N; ++i) {
    cols[0][i] = 1.0;
    for (int d = 0; d < pop.dim(); ++d) cols[1 + d][i] = pop.coords.at(i, d);
  }
  return cols;
}

// Balanced Voronoi index: per sampled unit's cell, the vector of estimated
// minus true column totals, aggregated through the metric Q.
inline double balanced_voronoi_index(const Population& pop, const std::vector<int>& sample_units,
                                     const std::vector<std::vector<double>>& xcols,
                                     QSpec q = {}) {
  const int N = pop.size();
  const int n_pop = validate_population(pop);
  const int n = static_cast<int>(sample_units.size());
  require(n == n_pop, Errc::CardinalityMismatch, "sample size must match the design size");
  const int p = static_cast<int>(xcols.size());
  require(p >= 1, Errc::BadInput, "need at least one balancing column");
  for (const auto& c : xcols)
    require(static_cast<int>(c.size()) == N, Errc::DimensionMismatch,
            "balancing column length must match the population");

  std::vector<int> cell = voronoi_cells(pop.coords, sample_units);
  std::vector<char> in_sample(N, 0);
  for (int u : sample_units) in_sample[u] = 1;

  std::vector<std::vector<double>> Q(p, std::vector<double>(p, 0.0));
  if (q.kind == QSpec::Identity) {
    for (int j = 0; j < p; ++j) Q[j][j] = 1.0;
  } else {
    for (int i = 0; i < N; ++i)
      for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) Q[a][b] += xcols[a][i] * xcols[b][i];
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < a; ++b) Q[a][b] = Q[b][a];
  }

  double total = 0.0;
  std::vector<int> sorted = sample_units;
  std::sort(sorted.begin(), sorted.end());
  for (int s : sorted) {
    std::vector<double> r(p, 0.0);
    for (int i = 0; i < N; ++i)
      if (cell[i] == s)
        for (int j = 0; j < p; ++j) {
          if (in_sample[i]) r[j] += xcols[j][i] / pop.pi[i];
          r[j] -= xcols[j][i];
        }
    std::vector<double> qinv_r = detail::solve_spd(Q, r);
    for (int j = 0; j < p; ++j) total += r[j] * qinv_r[j];
  }
  return std::sqrt(total / n);
}

}  // namespace balsam

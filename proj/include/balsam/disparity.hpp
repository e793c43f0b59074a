#pragma once

// Density disparity: cluster the population with the sampled locations as
// starting centroids, translate each cluster so its centroid lands on its
// matched sampled location, and compare kernel densities before and after.
// Oversampled regions lose mass (negative contributions), undersampled ones
// gain it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "balsam/assignment.hpp"
#include "balsam/clustering.hpp"
#include "balsam/common.hpp"
#include "balsam/population.hpp"

namespace balsam {

struct DisparityConfig {
  double delta = 0.0;  // clustering expansion step; <= 0 selects the default
  std::int64_t expansion_cap = 1'000'000;
  double gamma_sin = 0.0;  // <= 0 selects sin(pi/8)
  double gamma_cos = 0.0;  // <= 0 selects 1 - cos(pi/8)
};

// Everything the comparison stage consumes; holding this fixed makes the
// index exactly translation invariant and lets tests pin the geometry.
struct DisparityContext {
  std::vector<int> label;          // unit -> cluster
  Coords offsets;                  // per cluster, the applied translation
  std::array<double, 2> bandwidth{};
};

struct DisparityReport {
  double di = 0.0;
  double d_net = 0.0;
  double d_plus = 0.0;
  double d_minus = 0.0;
  double eta = 0.0;
  int n = 0;
  int N = 0;
  std::array<double, 2> bandwidth{};
  struct UnitRow {
    int unit;
    double f_orig;
    double f_trans;
    double sin_a;
    double cos_a;
  };
  std::vector<UnitRow> rows;
};

// Product-form bandwidth per coordinate: sd * N^(-1/6), floored away from
// zero so degenerate spreads stay usable.
inline std::array<double, 2> scott_bandwidth(const Coords& coords) {
  require(coords.dim == 2, Errc::DimensionMismatch, "density comparison needs planar coordinates");
  const int N = coords.size();
  require(N >= 2, Errc::BadInput, "need at least two units for a bandwidth");
  std::array<double, 2> h{};
  const double factor = std::pow(static_cast<double>(N), -1.0 / 6.0);
  for (int d = 0; d < 2; ++d) {
    double mean = 0.0, lo = coords.at(0, d), hi = coords.at(0, d);
    for (int i = 0; i < N; ++i) {
      mean += coords.at(i, d);
      lo = std::min(lo, coords.at(i, d));
      hi = std::max(hi, coords.at(i, d));
    }
    mean /= N;
    double ss = 0.0;
    for (int i = 0; i < N; ++i) {
      double c = coords.at(i, d) - mean;
      ss += c * c;
    }
    double sd = std::sqrt(ss / (N - 1));
    double range = hi - lo;
    if (range == 0.0) {
      h[d] = 1.0;
    } else {
      h[d] = std::max(sd * factor, 1e-6 * range);
    }
  }
  return h;
}

// Uniform product kernel: the fraction of data points whose box of half-width
// (h1, h2) covers the query, normalized by the box area.
inline double mkde_at(const double* point, const Coords& data, const std::array<double, 2>& h) {
  const int N = data.size();
  int count = 0;
  for (int i = 0; i < N; ++i)
    if (std::abs(point[0] - data.at(i, 0)) <= h[0] && std::abs(point[1] - data.at(i, 1)) <= h[1])
      ++count;
  return static_cast<double>(count) / (static_cast<double>(N) * 4.0 * h[0] * h[1]);
}

inline double scale_clamp(double beta, double gamma) {
  return std::clamp(beta / gamma, -1.0, 1.0);
}

// The comparison stage alone: densities, angles, and the aggregated index.
inline DisparityReport disparity_from_context(const Population& pop, const DisparityContext& ctx,
                                              const DisparityConfig& cfg = {}) {
  const int N = pop.size();
  require(pop.dim() == 2, Errc::DimensionMismatch, "density comparison needs planar coordinates");
  require(static_cast<int>(ctx.label.size()) == N, Errc::CardinalityMismatch,
          "context labels must cover every unit");
  const double gs = cfg.gamma_sin > 0.0 ? cfg.gamma_sin : std::sin(std::acos(-1.0) / 8.0);
  const double gc = cfg.gamma_cos > 0.0 ? cfg.gamma_cos : 1.0 - std::cos(std::acos(-1.0) / 8.0);

  Coords trans(2, N);
  for (int i = 0; i < N; ++i) {
    const int k = ctx.label[i];
    require(k >= 0 && k < ctx.offsets.size(), Errc::BadInput, "context label out of range");
    trans.at(i, 0) = pop.coords.at(i, 0) + ctx.offsets.at(k, 0);
    trans.at(i, 1) = pop.coords.at(i, 1) + ctx.offsets.at(k, 1);
  }

  DisparityReport rep;
  rep.n = ctx.offsets.size();
  rep.N = N;
  rep.bandwidth = ctx.bandwidth;
  rep.rows.reserve(N);

  double d_plus = 0.0, d_minus = 0.0, eta_sum = 0.0;
  for (int i = 0; i < N; ++i) {
    const double fo = mkde_at(pop.coords.row(i), pop.coords, ctx.bandwidth);
    const double ft = mkde_at(trans.row(i), trans, ctx.bandwidth);
    double sin_a, cos_a;
    if (fo == 0.0 && ft == 0.0) {
      sin_a = 0.0;
      cos_a = 1.0;
    } else {
      const double norm = std::sqrt(2.0) * std::sqrt(ft * ft + fo * fo);
      sin_a = (ft - fo) / norm;
      cos_a = (ft + fo) / norm;
    }
    const double neg_sin = -sin_a;
    if (neg_sin >= 0.0)
      d_plus += scale_clamp(neg_sin, gs);
    else
      d_minus += scale_clamp(neg_sin, gs);
    eta_sum += scale_clamp(1.0 - cos_a, gc);
    rep.rows.push_back({i, fo, ft, sin_a, cos_a});
  }

  rep.d_plus = d_plus;
  rep.d_minus = d_minus;
  rep.d_net = (d_plus + d_minus) / N;
  rep.eta = eta_sum / N;
  const double sgn = rep.d_net > 0.0 ? 1.0 : (rep.d_net < 0.0 ? -1.0 : 0.0);
  rep.di = rep.d_net + (sgn - rep.d_net) * rep.eta;
  return rep;
}

// Build the context for a realized sample: balanced clustering seeded at the
// sampled locations, minimum-cost matching of samples to final centroids, and
// the original-population bandwidth (reused for the translated cloud).
inline DisparityContext build_disparity_context(const Population& pop,
                                                const std::vector<int>& sample_units,
                                                const DisparityConfig& cfg = {},
                                                BalancedPartition* partition_out = nullptr) {
  require(pop.dim() == 2, Errc::DimensionMismatch, "density comparison needs planar coordinates");
  const int n = static_cast<int>(sample_units.size());
  require(n >= 1, Errc::EmptySample, "no sampled units");

  Coords sample_coords(2, n);
  for (int i = 0; i < n; ++i) {
    const int u = sample_units[i];
    require(u >= 0 && u < pop.size(), Errc::BadInput, "sample unit out of range");
    sample_coords.at(i, 0) = pop.coords.at(u, 0);
    sample_coords.at(i, 1) = pop.coords.at(u, 1);
  }

  BalancedPartition part =
      up_balanced_clustering(pop, n, cfg.delta, &sample_coords, /*seed=*/0, cfg.expansion_cap);

  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      cost[i][k] = euclid(sample_coords.row(i), part.centroids.row(k), 2);
  std::vector<int> row_to_col = hungarian(cost);
  canonicalize_assignment(cost, row_to_col);

  DisparityContext ctx;
  ctx.label = part.hard_label;
  ctx.offsets = Coords(2, n);
  for (int i = 0; i < n; ++i) {
    const int k = row_to_col[i];
    ctx.offsets.at(k, 0) = sample_coords.at(i, 0) - part.centroids.at(k, 0);
    ctx.offsets.at(k, 1) = sample_coords.at(i, 1) - part.centroids.at(k, 1);
  }
  ctx.bandwidth = scott_bandwidth(pop.coords);
  if (partition_out != nullptr) *partition_out = std::move(part);
  return ctx;
}

inline DisparityReport density_disparity_index(const Population& pop,
                                               const std::vector<int>& sample_units,
                                               const DisparityConfig& cfg = {},
                                               DisparityContext* ctx_out = nullptr) {
  DisparityContext ctx = build_disparity_context(pop, sample_units, cfg);
  DisparityReport rep = disparity_from_context(pop, ctx, cfg);
  if (ctx_out != nullptr) *ctx_out = std::move(ctx);
  return rep;
}

inline void write_disparity_json(std::ostream& os, const DisparityReport& rep) {
  nlohmann::json j{{"DI", rep.di},      {"D_net", rep.d_net}, {"D_plus", rep.d_plus},
                   {"D_minus", rep.d_minus}, {"eta", rep.eta}, {"n", rep.n},
                   {"N", rep.N},        {"bandwidth", {rep.bandwidth[0], rep.bandwidth[1]}}};
  os << j.dump(2) << '\n';
}

inline void write_disparity_units_csv(std::ostream& os, const DisparityReport& rep) {
  os << "unit,f_orig,f_trans,sin,cos\n";
  for (const auto& row : rep.rows)
    os << (row.unit + 1) << ',' << detail::fmt17(row.f_orig) << ',' << detail::fmt17(row.f_trans)
       << ',' << detail::fmt17(row.sin_a) << ',' << detail::fmt17(row.cos_a) << '\n';
}

}  // namespace balsam

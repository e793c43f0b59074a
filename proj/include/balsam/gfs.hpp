#pragma once

// Graphical one-uniform sampling: units are laid out as bars stacked into n
// columns of total height 1; a single uniform draw r picks one unit per
// stack. A bar that would overflow its stack wraps into the next one, which
// is what makes every stack contribute exactly one unit for any r.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "balsam/common.hpp"
#include "balsam/population.hpp"

namespace balsam {

struct BarPiece {
  int unit;
  double start;  // piece covers (start, end]; a piece starting at 0 also covers r == 0
  double end;
  int stack;
};

struct BarPiece12 {
  int unit;
  std::int64_t start;
  std::int64_t end;
  int stack;
};

struct BarLayout {
  int n = 0;  // number of stacks
  std::vector<BarPiece> pieces;
  // exact fixed-point mirror, present when all probabilities are decimal
  std::optional<std::vector<BarPiece12>> pieces12;
};

inline BarLayout build_bars(const Population& pop, const std::vector<int>& order) {
  const int N = pop.size();
  const int n = validate_population(pop);
  require(static_cast<int>(order.size()) == N, Errc::CardinalityMismatch,
          "placement order must list every unit once");
  {
    std::vector<char> seen(N, 0);
    for (int u : order) {
      require(u >= 0 && u < N && !seen[u], Errc::BadInput, "placement order is not a permutation");
      seen[u] = 1;
    }
  }

  BarLayout lay;
  lay.n = n;

  std::vector<double> mass(N);
  for (int i = 0; i < N; ++i) mass[i] = pop.pi[order[i]];
  auto fixed = to_fixed12(mass);
  if (fixed &&
      std::accumulate(fixed->begin(), fixed->end(), std::int64_t{0}) !=
          static_cast<std::int64_t>(n) * kDecScale)
    fixed.reset();

  if (fixed) {
    lay.pieces12.emplace();
    std::int64_t b = 0;
    int stack = 0;
    for (int i = 0; i < N; ++i) {
      const int u = order[i];
      const std::int64_t m = (*fixed)[i];
      if (b + m < kDecScale) {
        lay.pieces12->push_back({u, b, b + m, stack});
        b += m;
      } else if (b + m == kDecScale) {
        lay.pieces12->push_back({u, b, kDecScale, stack});
        b = 0;
        stack += 1;
      } else {
        lay.pieces12->push_back({u, b, kDecScale, stack});
        lay.pieces12->push_back({u, 0, b + m - kDecScale, stack + 1});
        b = b + m - kDecScale;
        stack += 1;
      }
    }
    require(stack == n && b == 0, Errc::InfeasibleProbabilities, "bars do not fill the stacks");
    lay.pieces.reserve(lay.pieces12->size());
    for (const auto& p : *lay.pieces12)
      lay.pieces.push_back({p.unit, static_cast<double>(p.start) / kDecScale,
                            static_cast<double>(p.end) / kDecScale, p.stack});
  } else {
    constexpr double kSnap = 1e-9;
    double b = 0.0;
    int stack = 0;
    for (int i = 0; i < N; ++i) {
      const int u = order[i];
      const double m = mass[i];
      if (b + m < 1.0 - kSnap) {
        lay.pieces.push_back({u, b, b + m, stack});
        b += m;
      } else if (b + m <= 1.0 + kSnap) {
        lay.pieces.push_back({u, b, 1.0, stack});
        b = 0.0;
        stack += 1;
      } else {
        lay.pieces.push_back({u, b, 1.0, stack});
        lay.pieces.push_back({u, 0.0, b + m - 1.0, stack + 1});
        b = b + m - 1.0;
        stack += 1;
      }
    }
    require(stack == n && std::abs(b) <= kSnap, Errc::InfeasibleProbabilities,
            "bars do not fill the stacks");
  }
  return lay;
}

// The n selected units for a given r in [0, 1).
inline Sample draw_sample(const BarLayout& lay, double r) {
  require(r >= 0.0 && r < 1.0, Errc::BadInput, "r must lie in [0, 1)");
  Sample s;
  s.r = r;
  s.units.reserve(lay.n);
  for (const auto& p : lay.pieces)
    if ((p.start < r && r <= p.end) || (p.start == 0.0 && r == 0.0)) s.units.push_back(p.unit);
  std::sort(s.units.begin(), s.units.end());
  s.units.erase(std::unique(s.units.begin(), s.units.end()), s.units.end());
  require(static_cast<int>(s.units.size()) == lay.n, Errc::DegenerateSample,
          "draw did not select one unit per stack");
  return s;
}

inline Sample draw_sample(const BarLayout& lay, Rng& rng) { return draw_sample(lay, rng.next_double()); }

// Joint selection probabilities: the Lebesgue measure of the r-set where both
// units are selected. Within one stack pieces are disjoint, so only pieces in
// different stacks overlap.
inline JointInclusionMatrix joint_inclusion(const Population& pop, const BarLayout& lay) {
  const int N = pop.size();
  JointInclusionMatrix J;
  J.n = N;
  J.p.assign(static_cast<std::size_t>(N) * N, 0.0);

  std::vector<std::vector<int>> by_unit(N);
  for (int i = 0; i < static_cast<int>(lay.pieces.size()); ++i)
    by_unit[lay.pieces[i].unit].push_back(i);

  for (int a = 0; a < N; ++a) {
    J.p[static_cast<std::size_t>(a) * N + a] = pop.pi[a];
    for (int b = a + 1; b < N; ++b) {
      double m = 0.0;
      if (lay.pieces12) {
        std::int64_t acc = 0;
        for (int ia : by_unit[a])
          for (int ib : by_unit[b]) {
            const auto& pa = (*lay.pieces12)[ia];
            const auto& pb = (*lay.pieces12)[ib];
            acc += std::max<std::int64_t>(0, std::min(pa.end, pb.end) - std::max(pa.start, pb.start));
          }
        m = static_cast<double>(acc) / kDecScale;
      } else {
        for (int ia : by_unit[a])
          for (int ib : by_unit[b]) {
            const auto& pa = lay.pieces[ia];
            const auto& pb = lay.pieces[ib];
            m += std::max(0.0, std::min(pa.end, pb.end) - std::max(pa.start, pb.start));
          }
      }
      J.p[static_cast<std::size_t>(a) * N + b] = m;
      J.p[static_cast<std::size_t>(b) * N + a] = m;
    }
  }
  return J;
}

struct SupportInterval {
  double lo = 0.0;  // (lo, hi]; the first interval also contains r == 0
  double hi = 0.0;
  std::int64_t lo12 = 0;
  std::int64_t hi12 = 0;
  std::vector<int> units;  // ascending
  double length = 0.0;
};

// Exact enumeration of the distinct samples over r in [0, 1). Membership is
// piecewise constant between piece boundaries, and adjacent intervals with
// identical samples are merged. With the decimal fixed-point layout the
// interval endpoints are exact; otherwise boundaries within 1e-9 of each
// other collapse and each interval is probed at its midpoint (lo12/hi12 stay
// zero on that path).
inline std::vector<SupportInterval> enumerate_support(const BarLayout& lay) {
  if (!lay.pieces12) {
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& p : lay.pieces) {
      if (p.start > 0.0) cuts.push_back(p.start);
      if (p.end < 1.0) cuts.push_back(p.end);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> keep;
    for (double c : cuts)
      if (keep.empty() || c - keep.back() > 1e-9) keep.push_back(c);
    require(keep.size() >= 2 && std::abs(keep.back() - 1.0) <= 1e-9, Errc::BadInput,
            "piece boundaries do not span the unit interval");
    keep.back() = 1.0;

    std::vector<SupportInterval> out;
    for (std::size_t i = 0; i + 1 < keep.size(); ++i) {
      Sample probe = draw_sample(lay, 0.5 * (keep[i] + keep[i + 1]));
      if (!out.empty() && out.back().units == probe.units) {
        out.back().hi = keep[i + 1];
      } else {
        SupportInterval si;
        si.lo = keep[i];
        si.hi = keep[i + 1];
        si.units = std::move(probe.units);
        out.push_back(std::move(si));
      }
    }
    for (auto& si : out) si.length = si.hi - si.lo;
    return out;
  }
  std::vector<std::int64_t> cuts;
  cuts.push_back(0);
  cuts.push_back(kDecScale);
  for (const auto& p : *lay.pieces12) {
    if (p.start > 0) cuts.push_back(p.start);
    if (p.end < kDecScale) cuts.push_back(p.end);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<SupportInterval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const std::int64_t lo = cuts[i], hi = cuts[i + 1];
    std::vector<int> units;
    for (const auto& p : *lay.pieces12)
      if (p.start < hi && hi <= p.end) units.push_back(p.unit);
    std::sort(units.begin(), units.end());
    units.erase(std::unique(units.begin(), units.end()), units.end());
    require(static_cast<int>(units.size()) == lay.n, Errc::DegenerateSample,
            "support interval does not select one unit per stack");
    if (!out.empty() && out.back().units == units) {
      out.back().hi12 = hi;
    } else {
      SupportInterval si;
      si.lo12 = lo;
      si.hi12 = hi;
      si.units = std::move(units);
      out.push_back(std::move(si));
    }
  }
  for (auto& si : out) {
    si.lo = static_cast<double>(si.lo12) / kDecScale;
    si.hi = static_cast<double>(si.hi12) / kDecScale;
    si.length = static_cast<double>(si.hi12 - si.lo12) / kDecScale;
  }
  return out;
}

// Layout export: one row per piece, in construction order.
inline void write_layout_csv(std::ostream& os, const BarLayout& lay) {
  os << "unit,piece_start,piece_end,stack\n";
  for (const auto& p : lay.pieces)
    os << (p.unit + 1) << ',' << detail::fmt17(p.start) << ',' << detail::fmt17(p.end) << ','
       << (p.stack + 1) << '\n';
}

}  // namespace balsam

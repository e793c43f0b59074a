#pragma once

// Unequal-probability balanced clustering: expand units into pseudo-copies,
// run a size-constrained n-means, derive soft memberships, order clusters
// along a shortest open path, align members within clusters, and cut the
// resulting total order into n blocks of probability mass exactly 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "balsam/assignment.hpp"
#include "balsam/common.hpp"
#include "balsam/population.hpp"

namespace balsam {

struct ExpandedFrame {
  Coords pts;               // pseudo-copies, one row per copy
  std::vector<int> owner;   // copy -> source unit
  std::vector<int> count;   // per unit, number of copies (>= 1)
};

// count_u = max(1, round(pi_u / delta)); every unit keeps at least one copy.
inline ExpandedFrame expand(const Population& pop, double delta,
                            std::int64_t cap = 1'000'000) {
  require(delta > 0.0 && std::isfinite(delta), Errc::BadInput, "expansion step must be positive");
  const int N = pop.size();
  ExpandedFrame out;
  out.pts.dim = pop.dim();
  out.count.resize(N);
  std::int64_t total = 0;
  for (int i = 0; i < N; ++i) {
    std::int64_t c = std::max<std::int64_t>(1, std::llround(pop.pi[i] / delta));
    out.count[i] = static_cast<int>(c);
    total += c;
    require(total <= cap, Errc::ExpansionTooLarge,
            "expansion needs " + std::to_string(total) + "+ pseudo-copies (cap " +
                std::to_string(cap) + "); increase delta");
  }
  out.owner.reserve(static_cast<std::size_t>(total));
  out.pts.data.reserve(static_cast<std::size_t>(total) * pop.dim());
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < out.count[i]; ++c) {
      out.owner.push_back(i);
      out.pts.push_row(pop.coords.row(i));
    }
  return out;
}

struct NmeansResult {
  std::vector<int> label;  // per point
  Coords means;            // n rows
  double cost = 0.0;       // total squared distance at the returned labels
  int iters = 0;
};

// Lloyd iteration whose assignment step is an exact balanced min-cost
// transport (cluster sizes differ by at most one). Seed only matters when no
// init centroids are given.
inline NmeansResult constrained_nmeans(const Coords& pts, int n, std::uint64_t seed,
                                       const Coords* init = nullptr) {
  const int P = pts.size();
  const int dim = pts.dim;
  require(n >= 1, Errc::BadInput, "need at least one cluster");
  require(P >= n, Errc::CardinalityMismatch, "fewer points than clusters");

  NmeansResult res;
  res.means = Coords(dim, n);
  if (init != nullptr) {
    require(init->size() == n && init->dim == dim, Errc::CardinalityMismatch,
            "init centroids must be n x dim");
    res.means = *init;
  } else {
    std::vector<int> idx(P);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
      std::swap(idx[i], idx[i + static_cast<int>(rng.next_below(P - i))]);
    for (int k = 0; k < n; ++k)
      std::copy(pts.row(idx[k]), pts.row(idx[k]) + dim, res.means.row(k));
  }

  constexpr int kMaxIters = 50;
  constexpr double kRelTol = 1e-6;
  double prev_cost = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIters; ++it) {
    res.label = balanced_transport(P, n, [&](int p, int k) {
      return sq_dist(pts.row(p), res.means.row(k), dim);
    });
    res.cost = 0.0;
    for (int p = 0; p < P; ++p) res.cost += sq_dist(pts.row(p), res.means.row(res.label[p]), dim);
    res.iters = it + 1;

    std::fill(res.means.data.begin(), res.means.data.end(), 0.0);
    std::vector<int> sz(n, 0);
    for (int p = 0; p < P; ++p) {
      sz[res.label[p]] += 1;
      for (int d = 0; d < dim; ++d) res.means.at(res.label[p], d) += pts.at(p, d);
    }
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < dim; ++d) res.means.at(k, d) /= sz[k];

    // the sentinel is infinite on the first pass; inf <= inf would stop us
    if (std::isfinite(prev_cost) &&
        prev_cost - res.cost <= kRelTol * std::max(prev_cost, 1e-30))
      break;
    prev_cost = res.cost;
  }
  return res;
}

// M[u][k] = fraction of unit u's pseudo-copies labeled k; rows sum to 1.
inline std::vector<std::vector<double>> soft_membership(const ExpandedFrame& frame,
                                                        const std::vector<int>& label, int n) {
  const int N = static_cast<int>(frame.count.size());
  require(label.size() == frame.owner.size(), Errc::DimensionMismatch,
          "labels must cover every pseudo-copy");
  std::vector<std::vector<double>> M(N, std::vector<double>(n, 0.0));
  for (std::size_t p = 0; p < label.size(); ++p) M[frame.owner[p]][label[p]] += 1.0;
  for (int u = 0; u < N; ++u)
    for (int k = 0; k < n; ++k) M[u][k] /= frame.count[u];
  return M;
}

// Shortest open path through the centroids: best nearest-neighbor start,
// then 2-opt to a local optimum. Orientation is canonicalized so equal-cost
// reversals cannot flip the result.
inline std::vector<int> order_clusters(const Coords& centroids) {
  const int n = centroids.size();
  std::vector<int> best;
  if (n <= 2) {
    best.resize(n);
    std::iota(best.begin(), best.end(), 0);
    return best;
  }
  std::vector<double> dmat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dmat[static_cast<std::size_t>(i) * n + j] = euclid(centroids.row(i), centroids.row(j), centroids.dim);
  auto D = [&](int i, int j) { return dmat[static_cast<std::size_t>(i) * n + j]; };
  auto path_cost = [&](const std::vector<int>& p) {
    double c = 0.0;
    for (int i = 0; i + 1 < n; ++i) c += D(p[i], p[i + 1]);
    return c;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  for (int start = 0; start < n; ++start) {
    std::vector<int> path{start};
    std::vector<char> used(n, 0);
    used[start] = 1;
    while (static_cast<int>(path.size()) < n) {
      int cur = path.back(), nxt = -1;
      double dbest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (!used[j] && D(cur, j) < dbest) {
          dbest = D(cur, j);
          nxt = j;
        }
      path.push_back(nxt);
      used[nxt] = 1;
    }
    double c = path_cost(path);
    if (c < best_cost) {
      best_cost = c;
      best = path;
    }
  }

  // 2-opt for open paths: reverse [i..j]; only the boundary edges change.
  constexpr int kMaxPasses = 1000;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool improved = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // full reversal changes nothing
        double delta = 0.0;
        if (i > 0) delta += D(best[i - 1], best[j]) - D(best[i - 1], best[i]);
        if (j < n - 1) delta += D(best[i], best[j + 1]) - D(best[j], best[j + 1]);
        if (delta < -1e-12) {
          std::reverse(best.begin() + i, best.begin() + j + 1);
          improved = true;
        }
      }
    if (!improved) break;
  }
  if (best.front() > best.back()) std::reverse(best.begin(), best.end());
  return best;
}

// ---------------------------------------------------------------------------
// Quota cutting: split an ordered mass sequence into `blocks` consecutive
// blocks of equal target. Exact in int64 when masses are decimal-scaled.

struct QuotaCut {
  // per ordered entry, its (block, mass) shares in block order; masses are in
  // the same units as the input sequence
  std::vector<std::vector<std::pair<int, double>>> entry_blocks;
  std::optional<std::vector<std::vector<std::pair<int, std::int64_t>>>> entry_blocks_exact;
};

inline QuotaCut cut_quota_exact(const std::vector<std::int64_t>& mass, std::int64_t quotum,
                                int blocks) {
  std::int64_t total = 0;
  for (auto m : mass) {
    require(m > 0, Errc::BadInput, "masses must be positive");
    total += m;
  }
  require(total == quotum * blocks, Errc::NonIntegerTotal, "masses do not fill the blocks exactly");
  QuotaCut cut;
  cut.entry_blocks.resize(mass.size());
  cut.entry_blocks_exact.emplace(mass.size());
  std::int64_t c = 0;
  int b = 0;
  for (std::size_t e = 0; e < mass.size(); ++e) {
    std::int64_t rem = mass[e];
    while (rem > 0) {
      while (b < blocks - 1 && c == quotum * (b + 1)) ++b;
      std::int64_t room = quotum * (b + 1) - c;
      std::int64_t take = std::min(rem, room);
      cut.entry_blocks[e].push_back({b, static_cast<double>(take)});
      (*cut.entry_blocks_exact)[e].push_back({b, take});
      c += take;
      rem -= take;
    }
  }
  return cut;
}

// Floating-point fallback; shares within `snap` of a block boundary are
// snapped so near-degenerate fractions become whole memberships.
inline QuotaCut cut_quota_float(const std::vector<double>& mass, double quotum, int blocks,
                                double snap = 1e-9) {
  QuotaCut cut;
  cut.entry_blocks.resize(mass.size());
  double c = 0.0;
  int b = 0;
  for (std::size_t e = 0; e < mass.size(); ++e) {
    require(mass[e] > 0.0, Errc::BadInput, "masses must be positive");
    double start = c;
    double end = c + mass[e];
    double assigned_from = start;
    while (true) {
      double t_next = quotum * (b + 1);
      bool last_block = (b == blocks - 1);
      if (last_block || end <= t_next + snap) {
        // entry finishes in this block (possibly exactly on the boundary)
        double share = end - assigned_from;
        if (share > snap) cut.entry_blocks[e].push_back({b, share});
        else if (!cut.entry_blocks[e].empty()) cut.entry_blocks[e].back().second += share;
        else if (share > 0) cut.entry_blocks[e].push_back({b, share});
        if (!last_block && end >= t_next - snap) ++b;
        break;
      }
      double share = t_next - assigned_from;
      if (share > snap) {
        cut.entry_blocks[e].push_back({b, share});
        assigned_from = t_next;
      } else if (!cut.entry_blocks[e].empty()) {
        cut.entry_blocks[e].back().second += share;
        assigned_from = t_next;
      }
      // a sub-snap leading share with nothing to merge into rolls forward
      ++b;
    }
    c = end;
  }
  return cut;
}

// ---------------------------------------------------------------------------

struct BalancedPartition {
  int n = 0;
  // per unit: (cluster, fraction of the unit's probability), ascending cluster
  std::vector<std::vector<std::pair<int, double>>> alloc;
  Coords centroids;         // final: means over argmax-fraction members
  Coords centroids_prelim;  // pre-quota hard-label means, in path positions
  std::vector<int> path_order;   // clusters are stored in path order
  std::vector<int> total_order;  // the unit order the quota cut ran along
  struct Border {
    int unit;
    int left;
    int right;
    double left_share;  // fraction of the unit's probability in `left`
  };
  std::vector<Border> borders;
  std::vector<int> hard_label;  // final argmax-fraction labels
  // exact per-unit (cluster, mass) at decimal scale 1e-12 when available
  std::optional<std::vector<std::vector<std::pair<int, std::int64_t>>>> alloc12;

  // Units allocated wholly to `k`, ascending.
  std::vector<int> whole_members(int k) const {
    std::vector<int> out;
    for (int u = 0; u < static_cast<int>(alloc.size()); ++u)
      if (alloc[u].size() == 1 && alloc[u][0].first == k) out.push_back(u);
    return out;
  }
};

struct QuotaSplitResult {
  std::vector<std::vector<std::pair<int, double>>> alloc;  // unit -> (cluster, fraction)
  std::vector<BalancedPartition::Border> borders;
  std::optional<std::vector<std::vector<std::pair<int, std::int64_t>>>> alloc12;
};

// Cut the units, walked in `order`, into n clusters of probability mass 1.
inline QuotaSplitResult quota_split(const Population& pop, const std::vector<int>& order, int n) {
  const int N = pop.size();
  require(static_cast<int>(order.size()) == N, Errc::CardinalityMismatch,
          "total order must list every unit once");
  std::vector<double> mass(N);
  for (int i = 0; i < N; ++i) mass[i] = pop.pi[order[i]];

  QuotaSplitResult out;
  out.alloc.assign(N, {});
  auto fixed = to_fixed12(mass);
  QuotaCut cut;
  if (fixed) {
    std::int64_t total = std::accumulate(fixed->begin(), fixed->end(), std::int64_t{0});
    if (total == static_cast<std::int64_t>(n) * kDecScale) {
      cut = cut_quota_exact(*fixed, kDecScale, n);
      out.alloc12.emplace(N);
    } else {
      fixed.reset();
    }
  }
  if (!fixed) cut = cut_quota_float(mass, 1.0, n);

  for (int i = 0; i < N; ++i) {
    const int u = order[i];
    double denom = fixed ? static_cast<double>((*fixed)[i]) : pop.pi[u];
    for (auto [blk, m] : cut.entry_blocks[i]) out.alloc[u].push_back({blk, m / denom});
    if (fixed)
      for (auto [blk, m12] : (*cut.entry_blocks_exact)[i]) (*out.alloc12)[u].push_back({blk, m12});
    // a unit's probability never exceeds one block's quota
    require(out.alloc[u].size() <= 2, Errc::InconsistentBorders,
            "unit spans more than two clusters");
    if (out.alloc[u].size() == 2)
      out.borders.push_back({u, out.alloc[u][0].first, out.alloc[u][1].first,
                             out.alloc[u][0].second});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

// Distance from a unit to its nearest neighbor in a cluster; falls back to
// the cluster centroid when the cluster holds no whole unit.
inline double dist_to_cluster(const Coords& coords, int u, const std::vector<int>& members,
                              const double* fallback_centroid, int dim) {
  if (members.empty()) return euclid(coords.row(u), fallback_centroid, dim);
  double best = std::numeric_limits<double>::infinity();
  for (int m : members) best = std::min(best, euclid(coords.row(u), coords.row(m), dim));
  return best;
}

}  // namespace detail

// Full pipeline. delta <= 0 selects the default n/(10N). init, when given,
// supplies the n starting centroids (one per sampled location in the density
// disparity pipeline); seed only matters when init is absent.
inline BalancedPartition up_balanced_clustering(const Population& pop, int n, double delta,
                                                const Coords* init, std::uint64_t seed,
                                                std::int64_t expansion_cap = 1'000'000) {
  const int N = pop.size();
  const int dim = pop.dim();
  const int n_pop = validate_population(pop);
  require(n == n_pop, Errc::CardinalityMismatch,
          "requested " + std::to_string(n) + " clusters but probabilities sum to " +
              std::to_string(n_pop));
  if (delta <= 0.0) delta = static_cast<double>(n) / (10.0 * N);

  // Work in centered coordinates so the pipeline depends only on relative
  // geometry; centroids are shifted back at the end.
  std::vector<double> center(dim, 0.0);
  for (int u = 0; u < N; ++u)
    for (int d = 0; d < dim; ++d) center[d] += pop.coords.at(u, d);
  for (int d = 0; d < dim; ++d) center[d] /= N;

  Population work = pop;
  for (int u = 0; u < N; ++u)
    for (int d = 0; d < dim; ++d) work.coords.at(u, d) -= center[d];
  Coords init_centered;
  if (init != nullptr) {
    require(init->size() == n && init->dim == dim, Errc::CardinalityMismatch,
            "init centroids must be n x dim");
    init_centered = *init;
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < dim; ++d) init_centered.at(k, d) -= center[d];
  }

  ExpandedFrame frame = expand(work, delta, expansion_cap);
  NmeansResult km = constrained_nmeans(frame.pts, n, derive_seed(seed, 0x6b6d),
                                       init ? &init_centered : nullptr);
  auto M = soft_membership(frame, km.label, n);

  // Preliminary hard labels: argmax membership; ties by distance to the
  // fitted mean, then lowest cluster index.
  std::vector<int> prelim(N, 0);
  for (int u = 0; u < N; ++u) {
    int bestk = 0;
    for (int k = 1; k < n; ++k) {
      if (M[u][k] > M[u][bestk]) {
        bestk = k;
      } else if (M[u][k] == M[u][bestk]) {
        double dk = sq_dist(work.coords.row(u), km.means.row(k), dim);
        double db = sq_dist(work.coords.row(u), km.means.row(bestk), dim);
        if (dk < db) bestk = k;
      }
    }
    prelim[u] = bestk;
  }

  // Preliminary centroids; a cluster that won no unit falls back to the mean
  // of its pseudo-copies so the path stays well defined.
  Coords prelim_cent(dim, n);
  std::vector<int> label_count(n, 0);
  for (int u = 0; u < N; ++u) {
    label_count[prelim[u]] += 1;
    for (int d = 0; d < dim; ++d) prelim_cent.at(prelim[u], d) += work.coords.at(u, d);
  }
  for (int k = 0; k < n; ++k) {
    if (label_count[k] > 0) {
      for (int d = 0; d < dim; ++d) prelim_cent.at(k, d) /= label_count[k];
    } else {
      int cnt = 0;
      for (std::size_t p = 0; p < km.label.size(); ++p)
        if (km.label[p] == k) {
          ++cnt;
          for (int d = 0; d < dim; ++d) prelim_cent.at(k, d) += frame.pts.at(static_cast<int>(p), d);
        }
      for (int d = 0; d < dim; ++d) prelim_cent.at(k, d) /= std::max(cnt, 1);
    }
  }

  std::vector<int> path = order_clusters(prelim_cent);

  // Members per path position, ordered by the 1-NN contrast between the
  // neighboring clusters; the member nearest the predecessor is pinned first,
  // the member nearest the successor last.
  std::vector<std::vector<int>> members(n);
  for (int u = 0; u < N; ++u)
    members[std::find(path.begin(), path.end(), prelim[u]) - path.begin()].push_back(u);

  std::vector<int> total_order;
  total_order.reserve(N);
  for (int pos = 0; pos < n; ++pos) {
    auto& mem = members[pos];
    if (mem.empty()) continue;
    const bool has_pred = pos > 0;
    const bool has_succ = pos < n - 1;
    const std::vector<int>* pred_mem = has_pred ? &members[pos - 1] : nullptr;
    const std::vector<int>* succ_mem = has_succ ? &members[pos + 1] : nullptr;
    const double* pred_cent = has_pred ? prelim_cent.row(path[pos - 1]) : nullptr;
    const double* succ_cent = has_succ ? prelim_cent.row(path[pos + 1]) : nullptr;

    std::vector<double> dpred(mem.size(), 0.0), dsucc(mem.size(), 0.0);
    for (std::size_t i = 0; i < mem.size(); ++i) {
      if (has_pred)
        dpred[i] = detail::dist_to_cluster(work.coords, mem[i], *pred_mem, pred_cent, dim);
      if (has_succ)
        dsucc[i] = detail::dist_to_cluster(work.coords, mem[i], *succ_mem, succ_cent, dim);
    }
    std::vector<int> idx(mem.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (has_pred || has_succ) {
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ca = (has_pred ? dpred[a] : 0.0) - (has_succ ? dsucc[a] : 0.0);
        double cb = (has_pred ? dpred[b] : 0.0) - (has_succ ? dsucc[b] : 0.0);
        if (ca != cb) return ca < cb;
        return mem[a] < mem[b];
      });
      if (has_pred && idx.size() > 1) {
        auto it = std::min_element(idx.begin(), idx.end(), [&](int a, int b) {
          return dpred[a] < dpred[b] || (dpred[a] == dpred[b] && mem[a] < mem[b]);
        });
        std::rotate(idx.begin(), it, it + 1);
      }
      if (has_succ && idx.size() > 1) {
        auto it = std::min_element(idx.begin() + (has_pred ? 1 : 0), idx.end(), [&](int a, int b) {
          return dsucc[a] < dsucc[b] || (dsucc[a] == dsucc[b] && mem[a] < mem[b]);
        });
        std::rotate(it, it + 1, idx.end());
      }
    }
    for (int i : idx) total_order.push_back(mem[i]);
  }

  QuotaSplitResult qs = quota_split(pop, total_order, n);

  BalancedPartition part;
  part.n = n;
  part.alloc = std::move(qs.alloc);
  part.borders = std::move(qs.borders);
  part.alloc12 = std::move(qs.alloc12);
  part.total_order = std::move(total_order);
  part.path_order.resize(n);
  std::iota(part.path_order.begin(), part.path_order.end(), 0);
  part.centroids_prelim = Coords(dim, n);
  for (int pos = 0; pos < n; ++pos)
    for (int d = 0; d < dim; ++d) part.centroids_prelim.at(pos, d) = prelim_cent.at(path[pos], d);

  // Final hard labels: argmax fraction; ties by distance to the preliminary
  // centroid of the candidate block, then lowest block index.
  part.hard_label.resize(N);
  for (int u = 0; u < N; ++u) {
    const auto& al = part.alloc[u];
    int best = al[0].first;
    double bestf = al[0].second;
    for (std::size_t i = 1; i < al.size(); ++i) {
      if (al[i].second > bestf) {
        best = al[i].first;
        bestf = al[i].second;
      } else if (al[i].second == bestf) {
        double di = sq_dist(work.coords.row(u), part.centroids_prelim.row(al[i].first), dim);
        double db = sq_dist(work.coords.row(u), part.centroids_prelim.row(best), dim);
        if (di < db) best = al[i].first;
      }
    }
    part.hard_label[u] = best;
  }

  part.centroids = Coords(dim, n);
  std::vector<int> hard_count(n, 0);
  for (int u = 0; u < N; ++u) {
    hard_count[part.hard_label[u]] += 1;
    for (int d = 0; d < dim; ++d) part.centroids.at(part.hard_label[u], d) += work.coords.at(u, d);
  }
  for (int k = 0; k < n; ++k) {
    if (hard_count[k] > 0)
      for (int d = 0; d < dim; ++d) part.centroids.at(k, d) /= hard_count[k];
    else
      for (int d = 0; d < dim; ++d) part.centroids.at(k, d) = part.centroids_prelim.at(k, d);
  }

  for (int k = 0; k < n; ++k)
    for (int d = 0; d < dim; ++d) {
      part.centroids.at(k, d) += center[d];
      part.centroids_prelim.at(k, d) += center[d];
    }
  return part;
}

// One row per (unit, cluster) share; ids and clusters are 1-based.
inline void write_partition_csv(std::ostream& os, const BalancedPartition& part) {
  os << "unit,cluster,fraction,is_border\n";
  for (int u = 0; u < static_cast<int>(part.alloc.size()); ++u)
    for (auto [k, f] : part.alloc[u])
      os << (u + 1) << ',' << (k + 1) << ',' << detail::fmt17(f) << ','
         << (part.alloc[u].size() > 1 ? 1 : 0) << '\n';
}

// Sidecar with the geometry the CSV cannot carry.
inline void write_partition_json(std::ostream& os, const BalancedPartition& part) {
  nlohmann::json j;
  j["n"] = part.n;
  auto coords_json = [](const Coords& cs) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < cs.size(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int d = 0; d < cs.dim; ++d) row.push_back(cs.at(i, d));
      out.push_back(std::move(row));
    }
    return out;
  };
  j["centroids"] = coords_json(part.centroids);
  j["centroidsPrelim"] = coords_json(part.centroids_prelim);
  nlohmann::json po = nlohmann::json::array();
  for (int c : part.path_order) po.push_back(c + 1);
  j["pathOrder"] = std::move(po);
  nlohmann::json to = nlohmann::json::array();
  for (int u : part.total_order) to.push_back(u + 1);
  j["totalOrder"] = std::move(to);
  nlohmann::json bs = nlohmann::json::array();
  for (const auto& b : part.borders)
    bs.push_back({{"unit", b.unit + 1},
                  {"left", b.left + 1},
                  {"right", b.right + 1},
                  {"leftShare", b.left_share}});
  j["borders"] = std::move(bs);
  os << j.dump(2) << '\n';
}

}  // namespace balsam

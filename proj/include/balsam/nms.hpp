#pragma once

// Nested-zone spatial sampling: each cluster of a balanced partition is
// subdivided into m zones of probability mass exactly 1/m. A shared ranking
// map psi1 orders the zones inside every cluster and psi2 orders the units
// inside every zone; concatenating clusters along the partition path (border
// units pinned at the seams, kept once) yields a total order whose bar layout
// puts zone j of every cluster onto the j-th subinterval of its stack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "balsam/clustering.hpp"
#include "balsam/common.hpp"
#include "balsam/gfs.hpp"
#include "balsam/population.hpp"

namespace balsam {

enum class RankingRule {
  HorizontalLex,
  VerticalLex,
  Random,
  RadialFromOrigin,
  DiagonalProjection,
  RadialFromCentroid,
  CentroidalPolar,
  MaxCoordinate,
  HilbertCurve,
};

inline const char* ranking_rule_name(RankingRule r) {
  switch (r) {
    case RankingRule::HorizontalLex: return "HorizontalLex";
    case RankingRule::VerticalLex: return "VerticalLex";
    case RankingRule::Random: return "Random";
    case RankingRule::RadialFromOrigin: return "RadialFromOrigin";
    case RankingRule::DiagonalProjection: return "DiagonalProjection";
    case RankingRule::RadialFromCentroid: return "RadialFromCentroid";
    case RankingRule::CentroidalPolar: return "CentroidalPolar";
    case RankingRule::MaxCoordinate: return "MaxCoordinate";
    case RankingRule::HilbertCurve: return "HilbertCurve";
  }
  return "?";
}

inline RankingRule ranking_rule_from_name(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(RankingRule::HilbertCurve); ++i)
    if (s == ranking_rule_name(static_cast<RankingRule>(i))) return static_cast<RankingRule>(i);
  fail(Errc::BadInput, "unknown ranking rule '" + s + "'");
}

namespace detail {

// Hilbert index on a 2^bits x 2^bits grid (standard xy-to-d walk).
inline std::uint64_t hilbert_index(int bits, std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << (bits - 1); s > 0; s >>= 1) {
    std::uint32_t rx = (x & s) ? 1 : 0;
    std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

}  // namespace detail

// Order a set of units by a ranking rule over their first two coordinates.
// Every rule ends with an id tiebreak, so the result is a total order; the
// seed only matters for the Random rule.
inline std::vector<int> rank_points(const Coords& coords, std::vector<int> ids, RankingRule rule,
                                    std::uint64_t seed) {
  if (ids.size() <= 1) return ids;
  const int dim = coords.dim;
  auto X = [&](int u) { return coords.at(u, 0); };
  auto Y = [&](int u) { return dim >= 2 ? coords.at(u, 1) : 0.0; };

  std::sort(ids.begin(), ids.end());
  if (rule == RankingRule::Random) {
    Rng rng(seed);
    for (std::size_t i = 0; i + 1 < ids.size(); ++i)
      std::swap(ids[i], ids[i + static_cast<std::size_t>(rng.next_below(ids.size() - i))]);
    return ids;
  }

  double cx = 0.0, cy = 0.0;
  double lox = X(ids[0]), hix = lox, loy = Y(ids[0]), hiy = loy;
  for (int u : ids) {
    cx += X(u);
    cy += Y(u);
    lox = std::min(lox, X(u));
    hix = std::max(hix, X(u));
    loy = std::min(loy, Y(u));
    hiy = std::max(hiy, Y(u));
  }
  cx /= static_cast<double>(ids.size());
  cy /= static_cast<double>(ids.size());

  // keys[u] compared lexicographically, then unit id
  std::vector<std::array<double, 3>> key(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int u = ids[i];
    const double x = X(u), y = Y(u);
    switch (rule) {
      case RankingRule::HorizontalLex: key[i] = {x, y, 0.0}; break;
      case RankingRule::VerticalLex: key[i] = {y, x, 0.0}; break;
      case RankingRule::RadialFromOrigin: key[i] = {std::hypot(x, y), x, y}; break;
      case RankingRule::DiagonalProjection: key[i] = {x + y, x, y}; break;
      case RankingRule::RadialFromCentroid: key[i] = {std::hypot(x - cx, y - cy), x, y}; break;
      case RankingRule::CentroidalPolar: {
        double ang = std::atan2(y - cy, x - cx);  // (-pi, pi]; atan2(0,0) = 0
        if (ang <= -std::acos(-1.0)) ang = std::acos(-1.0);
        key[i] = {ang, std::hypot(x - cx, y - cy), 0.0};
        break;
      }
      case RankingRule::MaxCoordinate: key[i] = {std::max(x, y), x, y}; break;
      case RankingRule::HilbertCurve: {
        // order-16 discretization of the bounding box; collisions fall back
        // to the remaining lexicographic keys
        constexpr int kBits = 16;
        constexpr double kCells = 65536.0;
        auto cellify = [](double v, double lo, double hi) -> std::uint32_t {
          if (hi <= lo) return 0;
          double t = (v - lo) / (hi - lo) * kCells;
          return static_cast<std::uint32_t>(std::clamp(t, 0.0, kCells - 1.0));
        };
        key[i] = {static_cast<double>(detail::hilbert_index(kBits, cellify(x, lox, hix),
                                                            cellify(y, loy, hiy))),
                  x, y};
        break;
      }
      case RankingRule::Random: break;  // handled above
    }
  }
  std::vector<int> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return ids[a] < ids[b];
  });
  std::vector<int> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = ids[order[i]];
  return out;
}

// ---------------------------------------------------------------------------

struct Zone {
  // ordered (unit, probability mass) entries; masses sum to 1/m
  std::vector<std::pair<int, double>> entries;
  // exact masses at scale m * 1e12, present on the decimal path
  std::optional<std::vector<std::pair<int, std::int64_t>>> entries12;
};

struct ClusterZoning {
  std::vector<Zone> zones;  // rank order, index j = rank j+1
};

// Fixed per-cluster frame from the partition: whole members plus the pinned
// border shares at each end.
struct ClusterFrame {
  std::vector<int> whole;  // ascending unit ids
  int left_unit = -1;
  double left_mass = 0.0;
  std::int64_t left12 = 0;
  int right_unit = -1;
  double right_mass = 0.0;
  std::int64_t right12 = 0;
};

struct NmsDesign {
  int n = 0;
  int m = 1;
  RankingRule psi1 = RankingRule::CentroidalPolar;
  RankingRule psi2 = RankingRule::CentroidalPolar;
  std::uint64_t seed = 0;
  bool exact = false;  // decimal fixed-point masses available throughout
  BalancedPartition partition;
  std::vector<ClusterFrame> frames;
  // editable state: per cluster, m groups of whole units; concatenated they
  // give the cluster's assembly order, and group j holds the units whose
  // mass begins in zone j
  std::vector<std::vector<std::vector<int>>> zone_units;
  std::vector<ClusterZoning> zoning;  // derived zone blocks
  std::vector<int> psi;               // total order
  BarLayout layout;
};

// Rebuild everything downstream of zone_units: per-cluster assembly orders,
// the zone quota cut, the total order, and the bar layout.
inline void rebuild_design(NmsDesign& d, const Population& pop) {
  const int n = d.n, m = d.m;
  d.zoning.assign(n, {});
  d.psi.clear();

  for (int c = 0; c < n; ++c) {
    const ClusterFrame& fr = d.frames[c];
    std::vector<int> units;
    std::vector<double> mass;
    std::vector<std::int64_t> mass12;
    auto push = [&](int u, double mm, std::int64_t m12) {
      units.push_back(u);
      mass.push_back(mm);
      mass12.push_back(m12);
    };
    if (fr.left_unit >= 0) push(fr.left_unit, fr.left_mass, fr.left12 * m);
    for (const auto& grp : d.zone_units[c])
      for (int u : grp) {
        std::int64_t m12 = d.exact ? (*d.partition.alloc12)[u][0].second * m : 0;
        push(u, pop.pi[u], m12);
      }
    if (fr.right_unit >= 0) push(fr.right_unit, fr.right_mass, fr.right12 * m);

    QuotaCut cut;
    if (d.exact) {
      cut = cut_quota_exact(mass12, kDecScale, m);
    } else {
      cut = cut_quota_float(mass, 1.0 / m, m);
    }

    // zone blocks, and the regrouped editable state (group = start block)
    ClusterZoning cz;
    cz.zones.assign(m, {});
    if (d.exact)
      for (auto& z : cz.zones) z.entries12.emplace();
    std::vector<std::vector<int>> groups(m);
    const double to_prob = d.exact ? 1.0 / (static_cast<double>(m) * kDecScale) : 1.0;
    for (std::size_t e = 0; e < units.size(); ++e) {
      const int u = units[e];
      const bool cluster_border = (u == fr.left_unit || u == fr.right_unit);
      bool first = true;
      for (auto [blk, share] : cut.entry_blocks[e]) {
        cz.zones[blk].entries.push_back({u, share * to_prob});
        if (first && !cluster_border) groups[blk].push_back(u);
        first = false;
      }
      if (d.exact)
        for (auto [blk, s12] : (*cut.entry_blocks_exact)[e])
          (*cz.zones[blk].entries12).push_back({u, s12});
    }
    d.zoning[c] = std::move(cz);
    d.zone_units[c] = std::move(groups);

    // seam handling: the shared border unit enters the total order once
    std::size_t from = 0;
    if (!d.psi.empty() && !units.empty() && d.psi.back() == units.front()) from = 1;
    for (std::size_t e = from; e < units.size(); ++e) d.psi.push_back(units[e]);
  }

  require(static_cast<int>(d.psi.size()) == pop.size(), Errc::InconsistentBorders,
          "total order must list every unit exactly once");
  d.layout = build_bars(pop, d.psi);
}

namespace detail {

// Preliminary spatial zoning of a cluster's whole units: pseudo-copy
// expansion at the zone scale, a size-constrained m-means, and argmax
// grouping. Returns m groups (possibly fewer nonempty) plus their centroids.
struct PrelimZones {
  std::vector<std::vector<int>> groups;
  Coords centroids;
};

inline PrelimZones prelim_zones(const Population& pop, const std::vector<int>& whole, int m,
                                double delta, std::uint64_t seed) {
  const int dim = pop.dim();
  const int Nw = static_cast<int>(whole.size());
  PrelimZones pz;
  pz.groups.assign(m, {});
  pz.centroids = Coords(dim, m);
  if (Nw == 0) return pz;

  // zone-scaled masses: multiply by m so the defaults of the cluster-level
  // machinery carry over
  if (delta <= 0.0) delta = static_cast<double>(m) / (10.0 * Nw);
  std::vector<int> count(Nw);
  std::int64_t total = 0;
  for (int i = 0; i < Nw; ++i) {
    count[i] = static_cast<int>(
        std::max<std::int64_t>(1, std::llround(m * pop.pi[whole[i]] / delta)));
    total += count[i];
  }
  require(total <= 1'000'000, Errc::ExpansionTooLarge, "zone expansion too large");

  if (total < m || Nw < 1) {
    // not enough pseudo-copies to form m spatial groups: one flat group
    pz.groups[0] = whole;
  } else {
    Coords pts(dim, 0);
    std::vector<int> owner;
    pts.data.reserve(static_cast<std::size_t>(total) * dim);
    for (int i = 0; i < Nw; ++i)
      for (int cdup = 0; cdup < count[i]; ++cdup) {
        pts.push_row(pop.coords.row(whole[i]));
        owner.push_back(i);
      }
    NmeansResult km = constrained_nmeans(pts, m, seed);
    std::vector<std::vector<double>> M(Nw, std::vector<double>(m, 0.0));
    for (std::size_t p = 0; p < owner.size(); ++p) M[owner[p]][km.label[p]] += 1.0;
    for (int i = 0; i < Nw; ++i) {
      int best = 0;
      for (int k = 1; k < m; ++k) {
        if (M[i][k] > M[i][best]) {
          best = k;
        } else if (M[i][k] == M[i][best]) {
          double dk = sq_dist(pop.coords.row(whole[i]), km.means.row(k), dim);
          double db = sq_dist(pop.coords.row(whole[i]), km.means.row(best), dim);
          if (dk < db) best = k;
        }
      }
      pz.groups[best].push_back(whole[i]);
    }
    for (int k = 0; k < m; ++k) {
      if (!pz.groups[k].empty()) {
        for (int u : pz.groups[k])
          for (int dd = 0; dd < dim; ++dd) pz.centroids.at(k, dd) += pop.coords.at(u, dd);
        for (int dd = 0; dd < dim; ++dd) pz.centroids.at(k, dd) /= pz.groups[k].size();
      } else {
        int cnt = 0;
        for (std::size_t p = 0; p < km.label.size(); ++p)
          if (km.label[p] == k) {
            ++cnt;
            for (int dd = 0; dd < dim; ++dd)
              pz.centroids.at(k, dd) += pts.at(static_cast<int>(p), dd);
          }
        for (int dd = 0; dd < dim; ++dd) pz.centroids.at(k, dd) /= std::max(cnt, 1);
      }
    }
    return pz;
  }
  // flat-group centroid(s)
  for (int u : pz.groups[0])
    for (int dd = 0; dd < dim; ++dd) pz.centroids.at(0, dd) += pop.coords.at(u, dd);
  if (!pz.groups[0].empty())
    for (int dd = 0; dd < dim; ++dd) pz.centroids.at(0, dd) /= pz.groups[0].size();
  return pz;
}

inline void build_frames(NmsDesign& d) {
  const auto& part = d.partition;
  const int N = static_cast<int>(part.alloc.size());
  d.frames.assign(d.n, {});
  for (const auto& b : part.borders)
    require(b.right == b.left + 1, Errc::InconsistentBorders,
            "border unit not shared by path-adjacent clusters");
  for (int u = 0; u < N; ++u) {
    const auto& al = part.alloc[u];
    if (al.size() == 1) {
      d.frames[al[0].first].whole.push_back(u);
    } else {
      const int cl = al[0].first, cr = al[1].first;
      d.frames[cl].right_unit = u;
      d.frames[cr].left_unit = u;
      if (d.exact) {
        d.frames[cl].right12 = (*part.alloc12)[u][0].second;
        d.frames[cr].left12 = (*part.alloc12)[u][1].second;
        d.frames[cl].right_mass = static_cast<double>(d.frames[cl].right12) / kDecScale;
        d.frames[cr].left_mass = static_cast<double>(d.frames[cr].left12) / kDecScale;
      }
    }
  }
}

}  // namespace detail

// Build a design: balanced partition, per-cluster zoning, psi1 over zone
// centroids, psi2 inside every zone, then the shared rebuild.
inline NmsDesign build_design(const Population& pop, int n, int m, RankingRule psi1,
                              RankingRule psi2, std::uint64_t seed, double delta = 0.0) {
  require(m >= 1, Errc::BadInput, "need at least one zone per cluster");
  NmsDesign d;
  d.n = n;
  d.m = m;
  d.psi1 = psi1;
  d.psi2 = psi2;
  d.seed = seed;
  d.partition = up_balanced_clustering(pop, n, delta, nullptr, derive_seed(seed, 0x7061'7274));
  d.exact = d.partition.alloc12.has_value();

  detail::build_frames(d);
  // border masses on the float path come from the partition fractions
  if (!d.exact)
    for (const auto& b : d.partition.borders) {
      double pi_u = pop.pi[b.unit];
      d.frames[b.left].right_mass = b.left_share * pi_u;
      d.frames[b.right].left_mass = (1.0 - b.left_share) * pi_u;
    }

  d.zone_units.assign(n, std::vector<std::vector<int>>(m));
  for (int c = 0; c < n; ++c) {
    detail::PrelimZones pz = detail::prelim_zones(pop, d.frames[c].whole, m, delta,
                                                  derive_seed(seed, 0x7a6f'0000 + c));
    // psi1: rank the zone groups by their centroids
    std::vector<int> nonempty;
    for (int k = 0; k < m; ++k)
      if (!pz.groups[k].empty()) nonempty.push_back(k);
    std::vector<int> zorder = rank_points(pz.centroids, nonempty, psi1,
                                          derive_seed(seed, 0x7031'0000 + c));
    int slot = 0;
    for (int k : zorder) {
      d.zone_units[c][slot++] = rank_points(
          pop.coords, pz.groups[k], psi2, derive_seed(seed, (0x7032ull << 32) + (c << 8) + k));
    }
  }
  rebuild_design(d, pop);
  return d;
}

inline Sample nms_sample(const NmsDesign& d, double r) { return draw_sample(d.layout, r); }
inline Sample nms_sample(const NmsDesign& d, Rng& rng) { return draw_sample(d.layout, rng); }

// Standalone zoning of one cluster: psi1 follows the shortest path through
// the zone centroids and psi2 follows the nearest-neighbor contrast between
// neighboring zones, mirroring the cluster-level pipeline.
inline ClusterZoning zone_cluster(const Population& pop, const NmsDesign& parent, int cluster,
                                  int m, double delta, std::uint64_t seed) {
  require(cluster >= 0 && cluster < parent.n, Errc::BadInput, "cluster index out of range");
  NmsDesign d = parent;
  d.m = m;
  const int dim = pop.dim();

  detail::PrelimZones pz =
      detail::prelim_zones(pop, d.frames[cluster].whole, m, delta, derive_seed(seed, 0x7a63));
  std::vector<int> nonempty;
  for (int k = 0; k < m; ++k)
    if (!pz.groups[k].empty()) nonempty.push_back(k);
  Coords cent(dim, static_cast<int>(nonempty.size()));
  for (std::size_t i = 0; i < nonempty.size(); ++i)
    for (int dd = 0; dd < dim; ++dd) cent.at(static_cast<int>(i), dd) = pz.centroids.at(nonempty[i], dd);
  std::vector<int> path = order_clusters(cent);

  d.zone_units.assign(parent.n, std::vector<std::vector<int>>(m));
  int slot = 0;
  for (int pi_pos : path) {
    const int k = nonempty[pi_pos];
    // within-zone order: ascending contrast between the distance to the
    // previous and next zone centroid along the path
    std::vector<int> mem = pz.groups[k];
    const bool has_pred = slot > 0;
    const bool has_succ = slot + 1 < static_cast<int>(path.size());
    if ((has_pred || has_succ) && mem.size() > 1) {
      const double* pc = has_pred ? cent.row(path[slot - 1]) : nullptr;
      const double* sc = has_succ ? cent.row(path[slot + 1]) : nullptr;
      std::stable_sort(mem.begin(), mem.end(), [&](int a, int b) {
        double ca = (pc ? euclid(pop.coords.row(a), pc, dim) : 0.0) -
                    (sc ? euclid(pop.coords.row(a), sc, dim) : 0.0);
        double cb = (pc ? euclid(pop.coords.row(b), pc, dim) : 0.0) -
                    (sc ? euclid(pop.coords.row(b), sc, dim) : 0.0);
        if (ca != cb) return ca < cb;
        return a < b;
      });
    }
    d.zone_units[cluster][slot++] = std::move(mem);
  }
  // other clusters only need a valid flat grouping for the rebuild
  for (int c = 0; c < parent.n; ++c) {
    if (c == cluster) continue;
    std::vector<int> flat;
    for (const auto& g : parent.zone_units[c])
      for (int u : g) flat.push_back(u);
    d.zone_units[c].assign(m, {});
    d.zone_units[c][0] = std::move(flat);
  }
  rebuild_design(d, pop);
  return d.zoning[cluster];
}

// ---------------------------------------------------------------------------
// Design JSON: ids and ranks are 1-based on the external surface.

inline nlohmann::json design_to_json(const NmsDesign& d) {
  using nlohmann::json;
  json j;
  j["n"] = d.n;
  j["m"] = d.m;
  j["psi1"] = ranking_rule_name(d.psi1);
  j["psi2"] = ranking_rule_name(d.psi2);
  j["seed"] = d.seed;
  j["exact"] = d.exact;

  json part;
  part["n"] = d.partition.n;
  json alloc = json::array();
  for (const auto& al : d.partition.alloc) {
    json row = json::array();
    for (auto [c, f] : al) row.push_back({c + 1, f});
    alloc.push_back(std::move(row));
  }
  part["alloc"] = std::move(alloc);
  if (d.partition.alloc12) {
    json a12 = json::array();
    for (const auto& al : *d.partition.alloc12) {
      json row = json::array();
      for (auto [c, mm] : al) row.push_back({c + 1, mm});
      a12.push_back(std::move(row));
    }
    part["alloc12"] = std::move(a12);
  }
  auto coords_json = [](const Coords& cs) {
    json out = json::array();
    for (int i = 0; i < cs.size(); ++i) {
      json row = json::array();
      for (int dd = 0; dd < cs.dim; ++dd) row.push_back(cs.at(i, dd));
      out.push_back(std::move(row));
    }
    return out;
  };
  part["centroids"] = coords_json(d.partition.centroids);
  part["centroidsPrelim"] = coords_json(d.partition.centroids_prelim);
  json po = json::array();
  for (int c : d.partition.path_order) po.push_back(c + 1);
  part["pathOrder"] = std::move(po);
  json to = json::array();
  for (int u : d.partition.total_order) to.push_back(u + 1);
  part["totalOrder"] = std::move(to);
  json bs = json::array();
  for (const auto& b : d.partition.borders)
    bs.push_back({{"unit", b.unit + 1},
                  {"left", b.left + 1},
                  {"right", b.right + 1},
                  {"leftShare", b.left_share}});
  part["borders"] = std::move(bs);
  json hl = json::array();
  for (int c : d.partition.hard_label) hl.push_back(c + 1);
  part["hardLabel"] = std::move(hl);
  j["partition"] = std::move(part);

  json zu = json::array();
  for (const auto& cl : d.zone_units) {
    json zc = json::array();
    for (const auto& g : cl) {
      json zg = json::array();
      for (int u : g) zg.push_back(u + 1);
      zc.push_back(std::move(zg));
    }
    zu.push_back(std::move(zc));
  }
  j["zoneUnits"] = std::move(zu);

  json zs = json::array();
  for (const auto& cl : d.zoning) {
    json zc = json::array();
    for (const auto& z : cl.zones) {
      json zj;
      json es = json::array();
      for (auto [u, mm] : z.entries) es.push_back({u + 1, mm});
      zj["entries"] = std::move(es);
      if (z.entries12) {
        json e12 = json::array();
        for (auto [u, mm] : *z.entries12) e12.push_back({u + 1, mm});
        zj["entries12"] = std::move(e12);
      }
      zc.push_back(std::move(zj));
    }
    zs.push_back(std::move(zc));
  }
  j["zones"] = std::move(zs);

  json psi = json::array();
  for (int u : d.psi) psi.push_back(u + 1);
  j["psi"] = std::move(psi);

  json lay;
  lay["n"] = d.layout.n;
  json pieces = json::array();
  for (const auto& p : d.layout.pieces) pieces.push_back({p.unit + 1, p.start, p.end, p.stack + 1});
  lay["pieces"] = std::move(pieces);
  if (d.layout.pieces12) {
    json p12 = json::array();
    for (const auto& p : *d.layout.pieces12) p12.push_back({p.unit + 1, p.start, p.end, p.stack + 1});
    lay["pieces12"] = std::move(p12);
  }
  j["layout"] = std::move(lay);
  return j;
}

inline NmsDesign design_from_json(const nlohmann::json& j) {
  NmsDesign d;
  d.n = j.at("n").get<int>();
  d.m = j.at("m").get<int>();
  d.psi1 = ranking_rule_from_name(j.at("psi1").get<std::string>());
  d.psi2 = ranking_rule_from_name(j.at("psi2").get<std::string>());
  d.seed = j.at("seed").get<std::uint64_t>();
  d.exact = j.at("exact").get<bool>();

  const auto& part = j.at("partition");
  d.partition.n = part.at("n").get<int>();
  for (const auto& row : part.at("alloc")) {
    std::vector<std::pair<int, double>> al;
    for (const auto& e : row) al.push_back({e.at(0).get<int>() - 1, e.at(1).get<double>()});
    d.partition.alloc.push_back(std::move(al));
  }
  if (part.contains("alloc12")) {
    d.partition.alloc12.emplace();
    for (const auto& row : part.at("alloc12")) {
      std::vector<std::pair<int, std::int64_t>> al;
      for (const auto& e : row) al.push_back({e.at(0).get<int>() - 1, e.at(1).get<std::int64_t>()});
      d.partition.alloc12->push_back(std::move(al));
    }
  }
  auto coords_from = [](const nlohmann::json& arr) {
    Coords cs;
    cs.dim = arr.empty() ? 0 : static_cast<int>(arr[0].size());
    for (const auto& row : arr) {
      for (const auto& v : row) cs.data.push_back(v.get<double>());
    }
    if (cs.dim == 0) cs.dim = 1;
    return cs;
  };
  d.partition.centroids = coords_from(part.at("centroids"));
  d.partition.centroids_prelim = coords_from(part.at("centroidsPrelim"));
  for (const auto& v : part.at("pathOrder")) d.partition.path_order.push_back(v.get<int>() - 1);
  for (const auto& v : part.at("totalOrder")) d.partition.total_order.push_back(v.get<int>() - 1);
  for (const auto& b : part.at("borders"))
    d.partition.borders.push_back({b.at("unit").get<int>() - 1, b.at("left").get<int>() - 1,
                                   b.at("right").get<int>() - 1, b.at("leftShare").get<double>()});
  for (const auto& v : part.at("hardLabel")) d.partition.hard_label.push_back(v.get<int>() - 1);

  for (const auto& zc : j.at("zoneUnits")) {
    std::vector<std::vector<int>> cl;
    for (const auto& zg : zc) {
      std::vector<int> g;
      for (const auto& v : zg) g.push_back(v.get<int>() - 1);
      cl.push_back(std::move(g));
    }
    d.zone_units.push_back(std::move(cl));
  }

  for (const auto& zc : j.at("zones")) {
    ClusterZoning cl;
    for (const auto& zj : zc) {
      Zone z;
      for (const auto& e : zj.at("entries"))
        z.entries.push_back({e.at(0).get<int>() - 1, e.at(1).get<double>()});
      if (zj.contains("entries12")) {
        z.entries12.emplace();
        for (const auto& e : zj.at("entries12"))
          z.entries12->push_back({e.at(0).get<int>() - 1, e.at(1).get<std::int64_t>()});
      }
      cl.zones.push_back(std::move(z));
    }
    d.zoning.push_back(std::move(cl));
  }

  for (const auto& v : j.at("psi")) d.psi.push_back(v.get<int>() - 1);

  const auto& lay = j.at("layout");
  d.layout.n = lay.at("n").get<int>();
  for (const auto& p : lay.at("pieces"))
    d.layout.pieces.push_back({p.at(0).get<int>() - 1, p.at(1).get<double>(), p.at(2).get<double>(),
                               p.at(3).get<int>() - 1});
  if (lay.contains("pieces12")) {
    d.layout.pieces12.emplace();
    for (const auto& p : lay.at("pieces12"))
      d.layout.pieces12->push_back({p.at(0).get<int>() - 1, p.at(1).get<std::int64_t>(),
                                    p.at(2).get<std::int64_t>(), p.at(3).get<int>() - 1});
  }

  // frames are derivable; rebuild them so edits keep working after a load
  detail::build_frames(d);
  if (!d.exact)
    for (const auto& b : d.partition.borders) {
      double pi_u = 0.0;
      for (const auto& cl : d.zoning)
        for (const auto& z : cl.zones)
          for (auto [u, mm] : z.entries)
            if (u == b.unit) pi_u += mm;
      d.frames[b.left].right_mass = b.left_share * pi_u;
      d.frames[b.right].left_mass = (1.0 - b.left_share) * pi_u;
    }
  return d;
}

inline void write_design_json(std::ostream& os, const NmsDesign& d) {
  os << design_to_json(d).dump(2) << '\n';
}

inline NmsDesign read_design_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  return design_from_json(j);
}

}  // namespace balsam

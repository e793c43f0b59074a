#pragma once

// Greedy best-first search over nested-zone designs: seed a few designs with
// fixed ranking rules, score each design by the exact expectation of a spread
// index over its selection support, then repeatedly pop the best candidate,
// mutate its orderings, and keep the best design ever scored.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "balsam/common.hpp"
#include "balsam/disparity.hpp"
#include "balsam/gfs.hpp"
#include "balsam/indices.hpp"
#include "balsam/nms.hpp"
#include "balsam/population.hpp"

namespace balsam {

enum class GuideIndex { MI, DI, VI, BI };

inline const char* guide_index_name(GuideIndex g) {
  switch (g) {
    case GuideIndex::MI: return "MI";
    case GuideIndex::DI: return "DI";
    case GuideIndex::VI: return "VI";
    case GuideIndex::BI: return "BI";
  }
  return "?";
}

inline GuideIndex guide_index_from_name(const std::string& s) {
  if (s == "MI") return GuideIndex::MI;
  if (s == "DI") return GuideIndex::DI;
  if (s == "VI") return GuideIndex::VI;
  if (s == "BI") return GuideIndex::BI;
  fail(Errc::BadInput, "unknown index '" + s + "'");
}

struct SearchConfig {
  int n = 4;  // sample size (clusters)
  int m = 4;  // zones per cluster
  int q = 4;  // seed designs
  int L = 200;
  std::optional<double> tau;
  int B = 8;
  int E = 2;
  GuideIndex guide = GuideIndex::MI;
  bool exact_score = true;
  int mc_draws = 10'000;  // used when exact_score is false
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t queue_cap = 10'000;
};

struct EditRecord {
  int type;  // 0 zone swap, 1 zone re-rank, 2 unit swap, 3 unit re-rank, -1 no-op
  int cluster;
  int a;  // zone index / zone index / position / unused
  int b;
  RankingRule rule;
  std::uint64_t rule_seed;
};

struct Candidate {
  NmsDesign design;
  double score = 0.0;
  double excluded_mass = 0.0;  // support mass whose index evaluation failed
  std::vector<EditRecord> provenance;
};

struct TraceRow {
  int iteration;
  double best_score;
  double popped_score;
  std::size_t queue_size;
};

// Scoring context: everything reusable across candidates for one population.
struct Scorer {
  const Population* pop = nullptr;
  GuideIndex guide = GuideIndex::MI;
  SpatialWeights weights;  // built for MI only
  std::vector<std::vector<double>> xcols;  // built for BI only
  DisparityConfig dcfg;

  static Scorer make(const Population& pop, int n, GuideIndex guide,
                     const DisparityConfig& dcfg = {}) {
    Scorer s;
    s.pop = &pop;
    s.guide = guide;
    s.dcfg = dcfg;
    if (guide == GuideIndex::MI) s.weights = build_weights_for_design(pop.coords, n);
    if (guide == GuideIndex::BI) s.xcols = default_balance_columns(pop);
    return s;
  }

  // higher = better spread
  double oriented(const std::vector<int>& units) const {
    switch (guide) {
      case GuideIndex::MI: return -moran_index(weights, units);
      case GuideIndex::VI: return -voronoi_index(*pop, units);
      case GuideIndex::BI: return -balanced_voronoi_index(*pop, units, xcols);
      case GuideIndex::DI: {
        DisparityReport rep = density_disparity_index(*pop, units, dcfg);
        return -std::abs(rep.di);
      }
    }
    return 0.0;
  }
};

struct ScoreBreakdown {
  double score = 0.0;
  double excluded_mass = 0.0;
};

// Exact expectation over the design's selection support.
inline ScoreBreakdown spread_score_exact(const Scorer& sc, const NmsDesign& d) {
  ScoreBreakdown out;
  for (const SupportInterval& si : enumerate_support(d.layout)) {
    try {
      out.score += si.length * sc.oriented(si.units);
    } catch (const Error&) {
      out.excluded_mass += si.length;
    }
  }
  return out;
}

// Monte Carlo estimate of the same expectation.
inline ScoreBreakdown spread_score_mc(const Scorer& sc, const NmsDesign& d, int K, Rng& rng) {
  require(K >= 1, Errc::BadInput, "need at least one draw");
  ScoreBreakdown out;
  int ok = 0;
  for (int k = 0; k < K; ++k) {
    Sample s = draw_sample(d.layout, rng);
    try {
      out.score += sc.oriented(s.units);
      ++ok;
    } catch (const Error&) {
      out.excluded_mass += 1.0;
    }
  }
  require(ok > 0, Errc::DegenerateSample, "every draw failed to score");
  out.score /= ok;
  out.excluded_mass /= K;
  return out;
}

inline ScoreBreakdown spread_score(const Scorer& sc, const NmsDesign& d, const SearchConfig& cfg,
                                   Rng& rng) {
  if (cfg.exact_score) return spread_score_exact(sc, d);
  return spread_score_mc(sc, d, cfg.mc_draws, rng);
}

namespace detail {

inline std::uint64_t psi_hash(const std::vector<int>& psi) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (int u : psi) h = splitmix64(h ^ static_cast<std::uint64_t>(u + 1));
  return h;
}

// centroid coordinates of the nonempty zone groups of one cluster
inline void zone_group_centroids(const Population& pop,
                                 const std::vector<std::vector<int>>& groups,
                                 std::vector<int>& nonempty, Coords& cent) {
  nonempty.clear();
  for (int j = 0; j < static_cast<int>(groups.size()); ++j)
    if (!groups[j].empty()) nonempty.push_back(j);
  cent = Coords(pop.dim(), static_cast<int>(nonempty.size()));
  for (std::size_t i = 0; i < nonempty.size(); ++i) {
    for (int u : groups[nonempty[i]])
      for (int d = 0; d < pop.dim(); ++d) cent.at(static_cast<int>(i), d) += pop.coords.at(u, d);
    for (int d = 0; d < pop.dim(); ++d)
      cent.at(static_cast<int>(i), d) /= groups[nonempty[i]].size();
  }
}

// One random ordering edit on the editable zone state; returns false when the
// drawn edit is inapplicable so the caller can redraw.
inline bool apply_edit(NmsDesign& d, const Population& pop, Rng& rng, EditRecord& rec) {
  const int n = d.n, m = d.m;
  rec.type = static_cast<int>(rng.next_below(4));
  rec.cluster = static_cast<int>(rng.next_below(n));
  rec.rule = RankingRule::CentroidalPolar;
  rec.rule_seed = 0;
  auto& groups = d.zone_units[rec.cluster];
  switch (rec.type) {
    case 0: {  // swap two zone ranks
      if (m < 2) return false;
      rec.a = static_cast<int>(rng.next_below(m));
      rec.b = static_cast<int>(rng.next_below(m - 1));
      if (rec.b >= rec.a) ++rec.b;
      std::swap(groups[rec.a], groups[rec.b]);
      return true;
    }
    case 1: {  // re-rank the cluster's zones by a random rule
      std::vector<int> nonempty;
      Coords cent;
      zone_group_centroids(pop, groups, nonempty, cent);
      if (nonempty.size() < 2) return false;
      rec.rule = static_cast<RankingRule>(rng.next_below(9));
      rec.rule_seed = rng.next_u64();
      std::vector<int> local(nonempty.size());
      std::iota(local.begin(), local.end(), 0);
      std::vector<int> order = rank_points(cent, local, rec.rule, rec.rule_seed);
      std::vector<std::vector<int>> picked(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) picked[i] = std::move(groups[nonempty[order[i]]]);
      for (std::size_t i = 0; i < nonempty.size(); ++i) groups[nonempty[i]] = std::move(picked[i]);
      rec.a = rec.b = -1;
      return true;
    }
    case 2: {  // swap two units inside one zone
      rec.a = static_cast<int>(rng.next_below(m));
      auto& g = groups[rec.a];
      if (g.size() < 2) return false;
      int i1 = static_cast<int>(rng.next_below(g.size()));
      int i2 = static_cast<int>(rng.next_below(g.size() - 1));
      if (i2 >= i1) ++i2;
      std::swap(g[i1], g[i2]);
      rec.b = i1 * 1000 + i2;  // positions, packed for the provenance log
      return true;
    }
    case 3: {  // re-rank one zone's units by a random rule
      rec.a = static_cast<int>(rng.next_below(m));
      auto& g = groups[rec.a];
      if (g.size() < 2) return false;
      rec.rule = static_cast<RankingRule>(rng.next_below(9));
      rec.rule_seed = rng.next_u64();
      g = rank_points(pop.coords, g, rec.rule, rec.rule_seed);
      rec.b = -1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// B children of a parent, each the result of E random ordering edits followed
// by one rebuild. Inapplicable edits are redrawn a bounded number of times;
// if nothing applies the edit degrades to a no-op.
inline std::vector<Candidate> propose_children(const Population& pop, const Candidate& parent,
                                               int B, int E, std::uint64_t seed) {
  std::vector<Candidate> out;
  out.reserve(B);
  for (int b = 0; b < B; ++b) {
    Candidate child;
    child.design = parent.design;
    child.provenance = parent.provenance;
    Rng rng(derive_seed(seed, 0xc41dull + static_cast<std::uint64_t>(b)));
    for (int e = 0; e < E; ++e) {
      EditRecord rec{};
      bool ok = false;
      for (int attempt = 0; attempt < 32 && !ok; ++attempt)
        ok = detail::apply_edit(child.design, pop, rng, rec);
      if (!ok) rec = EditRecord{-1, -1, -1, -1, RankingRule::CentroidalPolar, 0};
      child.provenance.push_back(rec);
    }
    rebuild_design(child.design, pop);
    out.push_back(std::move(child));
  }
  return out;
}

struct SearchResult {
  Candidate best;
  std::vector<TraceRow> trace;
  int iterations = 0;
};

inline SearchResult greedy_search(const Population& pop, const SearchConfig& cfg) {
  require(cfg.L >= 1 && cfg.B >= 1 && cfg.E >= 1 && cfg.q >= 1, Errc::BadInput,
          "search budgets must be positive");
  Scorer scorer = Scorer::make(pop, cfg.n, cfg.guide, {cfg.delta, 1'000'000, 0.0, 0.0});
  Rng score_rng(derive_seed(cfg.seed, 0x5c0e));

  // queue keyed by (score, -insertion counter): max score first, then oldest
  std::set<std::pair<double, long long>> queue;
  std::map<long long, Candidate> store;
  std::unordered_set<std::uint64_t> seen;
  long long counter = 0;

  SearchResult res;
  bool have_best = false;

  auto consider = [&](Candidate&& c) {
    if (!have_best || c.score > res.best.score) {
      res.best = c;
      have_best = true;
    }
    const std::uint64_t h = detail::psi_hash(c.design.psi);
    if (!seen.insert(h).second) return;
    ++counter;
    queue.insert({c.score, -counter});
    store.emplace(counter, std::move(c));
    while (queue.size() > cfg.queue_cap) {
      auto low = *queue.begin();
      queue.erase(queue.begin());
      store.erase(-low.second);
    }
  };

  static constexpr RankingRule kSeedRules[4] = {RankingRule::CentroidalPolar,
                                                RankingRule::HorizontalLex,
                                                RankingRule::HilbertCurve, RankingRule::Random};
  for (int i = 0; i < cfg.q; ++i) {
    const RankingRule rule = kSeedRules[i % 4];
    Candidate c;
    c.design = build_design(pop, cfg.n, cfg.m, rule, rule,
                            derive_seed(cfg.seed, 0x5eedull + static_cast<std::uint64_t>(i)),
                            cfg.delta);
    ScoreBreakdown sb = spread_score(scorer, c.design, cfg, score_rng);
    c.score = sb.score;
    c.excluded_mass = sb.excluded_mass;
    consider(std::move(c));
  }

  for (int it = 1; it <= cfg.L; ++it) {
    if (queue.empty()) break;
    if (cfg.tau && res.best.score >= *cfg.tau) break;

    auto top = *queue.rbegin();
    queue.erase(std::prev(queue.end()));
    auto node = store.extract(-top.second);
    Candidate parent = std::move(node.mapped());

    std::vector<Candidate> children = propose_children(
        pop, parent, cfg.B, cfg.E, derive_seed(cfg.seed, 0xe417ull + static_cast<std::uint64_t>(it)));
    for (Candidate& ch : children) {
      ScoreBreakdown sb = spread_score(scorer, ch.design, cfg, score_rng);
      ch.score = sb.score;
      ch.excluded_mass = sb.excluded_mass;
      consider(std::move(ch));
    }
    res.trace.push_back({it, res.best.score, parent.score, queue.size()});
    res.iterations = it;
  }
  return res;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,best_score,popped_score,queue_size\n";
  for (const auto& row : trace)
    os << row.iteration << ',' << detail::fmt17(row.best_score) << ','
       << detail::fmt17(row.popped_score) << ',' << row.queue_size << '\n';
}

}  // namespace balsam

#pragma once

// Experiment plumbing: synthetic population layouts, probability assignment,
// baseline designs (SRS and the local pivotal method), a k-means reduction
// for user data, and a seeded Monte Carlo driver that streams index values
// to CSV and boxplot statistics to JSON.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "balsam/common.hpp"
#include "balsam/disparity.hpp"
#include "balsam/gfs.hpp"
#include "balsam/gms.hpp"
#include "balsam/indices.hpp"
#include "balsam/nms.hpp"
#include "balsam/population.hpp"

namespace balsam {

// ---------------------------------------------------------------------------
// Probability assignment

// Scale positive sizes to sum to n, then iteratively pin values that exceed 1
// and rescale the rest; the total n is preserved exactly up to rounding.
inline std::vector<double> probabilities_from_sizes(const std::vector<double>& raw, int n) {
  const int N = static_cast<int>(raw.size());
  require(n >= 1 && n <= N, Errc::InfeasibleProbabilities, "need 1 <= n <= N");
  for (double v : raw)
    require(v > 0.0 && std::isfinite(v), Errc::BadInput, "size values must be positive");
  std::vector<double> pi(raw);
  std::vector<char> pinned(N, 0);
  int npinned = 0;
  for (int round = 0; round <= N; ++round) {
    double free_total = 0.0;
    for (int i = 0; i < N; ++i)
      if (!pinned[i]) free_total += raw[i];
    const double target = static_cast<double>(n - npinned);
    require(free_total > 0.0 || npinned == n, Errc::InfeasibleProbabilities,
            "cannot reach the requested total");
    bool changed = false;
    for (int i = 0; i < N; ++i) {
      if (pinned[i]) continue;
      pi[i] = raw[i] * target / free_total;
      if (pi[i] >= 1.0) {
        pi[i] = 1.0;
        pinned[i] = 1;
        ++npinned;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return pi;
}

// pi proportional to the rank of the x coordinate (plus an offset), so
// probabilities increase left to right.
inline std::vector<double> up_gradient_probabilities(const Coords& coords, int n,
                                                     double offset = 0.0) {
  const int N = coords.size();
  require(offset > -1.0, Errc::BadInput, "offset must keep ranks positive");
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return coords.at(a, 0) < coords.at(b, 0); });
  std::vector<double> raw(N);
  for (int r = 0; r < N; ++r) raw[idx[r]] = static_cast<double>(r + 1) + offset;
  return probabilities_from_sizes(raw, n);
}

// Meuse-style table: header `id,x,y,<aux>[,...]`, ids 1..N. The named column
// supplies raw sizes; pi = sizes rescaled to total n (or taken verbatim for
// column "pi"). raw_out, when given, receives the unscaled column.
inline Population read_population_csv_column(std::istream& in, const std::string& column, int n,
                                             std::vector<double>* raw_out = nullptr) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::BadInput, "empty population file");
  auto header = detail::split_csv_line(line);
  require(header.size() >= 4 && header.front() == "id", Errc::BadInput,
          "expected header id,x,y,<columns>");
  int cx = -1, cy = -1, caux = -1;
  for (int i = 1; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "x") cx = i;
    if (header[i] == "y") cy = i;
    if (header[i] == column) caux = i;
  }
  require(cx >= 0 && cy >= 0, Errc::BadInput, "need x and y columns");
  require(caux >= 0, Errc::BadInput, "no column named '" + column + "'");

  Population pop;
  pop.coords.dim = 2;
  std::vector<double> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    require(f.size() == header.size(), Errc::BadInput, "ragged population row");
    const long id = std::lround(detail::parse_double(f[0], "id"));
    require(id == static_cast<long>(raw.size()) + 1, Errc::BadInput, "ids must run 1..N in order");
    double c[2] = {detail::parse_double(f[cx], "x"), detail::parse_double(f[cy], "y")};
    pop.coords.push_row(c);
    raw.push_back(detail::parse_double(f[caux], column.c_str()));
  }
  require(!raw.empty(), Errc::BadInput, "population file has no rows");
  if (raw_out != nullptr) *raw_out = raw;
  if (column == "pi") {
    pop.pi = std::move(raw);
  } else {
    pop.pi = probabilities_from_sizes(raw, n);
  }
  validate_population(pop);
  return pop;
}

inline Population read_population_csv_column_file(const std::string& path,
                                                  const std::string& column, int n,
                                                  std::vector<double>* raw_out = nullptr) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::BadInput, "cannot open " + path);
  return read_population_csv_column(in, column, n, raw_out);
}

// ---------------------------------------------------------------------------
// Layout generators

enum class LayoutKind { Gridded, Random, Clustered, NeymanScott, Regular };

inline const char* layout_kind_name(LayoutKind k) {
  switch (k) {
    case LayoutKind::Gridded: return "gridded";
    case LayoutKind::Random: return "random";
    case LayoutKind::Clustered: return "clustered";
    case LayoutKind::NeymanScott: return "neyman-scott";
    case LayoutKind::Regular: return "regular";
  }
  return "?";
}

inline LayoutKind layout_kind_from_name(const std::string& s) {
  if (s == "gridded") return LayoutKind::Gridded;
  if (s == "random") return LayoutKind::Random;
  if (s == "clustered") return LayoutKind::Clustered;
  if (s == "neyman-scott") return LayoutKind::NeymanScott;
  if (s == "regular") return LayoutKind::Regular;
  fail(Errc::BadInput, "unknown layout '" + s + "'");
}

enum class ProbMode { EP, UPGradient };

struct PopulationSpec {
  LayoutKind layout = LayoutKind::Gridded;
  int N = 100;
  ProbMode prob = ProbMode::EP;
  int n = 4;
  double up_offset = 0.0;
  int blobs = 5;          // clustered layout
  double blob_sd = 0.05;  // clustered layout
  double ns_kappa = 25.0;  // parent intensity
  double ns_mu = 41.0;     // offspring per parent
  double ns_sigma = 0.03;  // offspring spread
  std::uint64_t seed = 0;
};

namespace detail {

inline double halton(std::int64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

// gaussian point around a center, resampled into the unit square
inline void gaussian_in_square(Rng& rng, double cx, double cy, double sd, double* out) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    double x = rng.next_normal(cx, sd);
    double y = rng.next_normal(cy, sd);
    if (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0) {
      out[0] = x;
      out[1] = y;
      return;
    }
  }
  out[0] = std::clamp(cx, 0.0, 1.0);
  out[1] = std::clamp(cy, 0.0, 1.0);
}

}  // namespace detail

inline Population gen_population(const PopulationSpec& spec) {
  require(spec.N >= 1, Errc::BadInput, "population size must be positive");
  require(spec.n >= 1 && spec.n <= spec.N, Errc::InfeasibleProbabilities, "need 1 <= n <= N");
  Population pop;
  pop.coords = Coords(2, spec.N);
  Rng rng(derive_seed(spec.seed, 0x706f70));

  switch (spec.layout) {
    case LayoutKind::Gridded: {
      const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.N))));
      for (int i = 0; i < spec.N; ++i) {
        pop.coords.at(i, 0) = (i % g + 0.5) / g;
        pop.coords.at(i, 1) = (i / g + 0.5) / g;
      }
      break;
    }
    case LayoutKind::Random: {
      for (int i = 0; i < spec.N; ++i) {
        pop.coords.at(i, 0) = rng.next_double();
        pop.coords.at(i, 1) = rng.next_double();
      }
      break;
    }
    case LayoutKind::Clustered: {
      require(spec.blobs >= 1, Errc::BadInput, "need at least one blob");
      std::vector<double> cx(spec.blobs), cy(spec.blobs);
      for (int b = 0; b < spec.blobs; ++b) {
        cx[b] = rng.next_double();
        cy[b] = rng.next_double();
      }
      for (int i = 0; i < spec.N; ++i) {
        int b = static_cast<int>(rng.next_below(spec.blobs));
        detail::gaussian_in_square(rng, cx[b], cy[b], spec.blob_sd, pop.coords.row(i));
      }
      break;
    }
    case LayoutKind::NeymanScott: {
      std::vector<double> px, py;
      long parents = 0;
      while (parents < 1) parents = rng.next_poisson(spec.ns_kappa);
      for (long p = 0; p < parents; ++p) {
        px.push_back(rng.next_double());
        py.push_back(rng.next_double());
      }
      std::vector<std::pair<double, double>> pts;
      auto spawn_round = [&]() {
        for (std::size_t p = 0; p < px.size(); ++p) {
          long kids = rng.next_poisson(spec.ns_mu);
          for (long k = 0; k < kids; ++k) {
            double xy[2];
            detail::gaussian_in_square(rng, px[p], py[p], spec.ns_sigma, xy);
            pts.push_back({xy[0], xy[1]});
          }
        }
      };
      spawn_round();
      while (static_cast<int>(pts.size()) < spec.N) spawn_round();
      // thin to exactly N with a partial shuffle
      for (int i = 0; i < spec.N; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(pts.size() - i));
        std::swap(pts[i], pts[j]);
      }
      for (int i = 0; i < spec.N; ++i) {
        pop.coords.at(i, 0) = pts[i].first;
        pop.coords.at(i, 1) = pts[i].second;
      }
      break;
    }
    case LayoutKind::Regular: {
      for (int i = 0; i < spec.N; ++i) {
        pop.coords.at(i, 0) = detail::halton(i + 1, 2);
        pop.coords.at(i, 1) = detail::halton(i + 1, 3);
      }
      break;
    }
  }

  if (spec.prob == ProbMode::EP) {
    pop.pi.assign(spec.N, static_cast<double>(spec.n) / spec.N);
  } else {
    pop.pi = up_gradient_probabilities(pop.coords, spec.n, spec.up_offset);
  }
  validate_population(pop);
  return pop;
}

// ---------------------------------------------------------------------------
// Baseline designs

inline Sample srs_sample(int N, int n, Rng& rng) {
  require(n >= 1 && n <= N, Errc::BadInput, "need 1 <= n <= N");
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n; ++i)
    std::swap(idx[i], idx[i + static_cast<int>(rng.next_below(N - i))]);
  Sample s;
  s.units.assign(idx.begin(), idx.begin() + n);
  std::sort(s.units.begin(), s.units.end());
  return s;
}

// Local pivotal method, variant 1: repeatedly find a mutual nearest-neighbor
// pair among the undecided units and run the pivotal update on it.
inline Sample lpm1_sample(const Population& pop, Rng& rng) {
  const int N = pop.size();
  validate_population(pop);
  constexpr double kEps = 1e-9;
  std::vector<double> p(pop.pi);
  std::vector<int> alive;
  for (int i = 0; i < N; ++i)
    if (p[i] > kEps && p[i] < 1.0 - kEps) alive.push_back(i);

  auto nearest_alive = [&](int i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int j : alive) {
      if (j == i) continue;
      double d = euclid(pop.coords.row(i), pop.coords.row(j), pop.dim());
      if (d < bd || (d == bd && (best < 0 || j < best))) {
        bd = d;
        best = j;
      }
    }
    return best;
  };

  while (alive.size() >= 2) {
    int i = alive[rng.next_below(alive.size())];
    // walk nearest-neighbor pointers to a mutual pair; a revisit also stops
    std::vector<char> visited(N, 0);
    int j = nearest_alive(i);
    while (!visited[i] && nearest_alive(j) != i) {
      visited[i] = 1;
      i = j;
      j = nearest_alive(i);
    }

    const double s = p[i] + p[j];
    const double u = rng.next_double();
    if (s < 1.0) {
      if (u < p[j] / s) {
        p[j] = s;
        p[i] = 0.0;
      } else {
        p[i] = s;
        p[j] = 0.0;
      }
    } else {
      // the unit kept at 1 must be i with probability (1-pj)/(2-s) so that
      // E[p_i'] = p_i
      if (u < (1.0 - p[j]) / (2.0 - s)) {
        p[i] = 1.0;
        p[j] = s - 1.0;
      } else {
        p[j] = 1.0;
        p[i] = s - 1.0;
      }
    }
    alive.erase(std::remove_if(alive.begin(), alive.end(),
                               [&](int k) { return p[k] <= kEps || p[k] >= 1.0 - kEps; }),
                alive.end());
  }

  Sample out;
  for (int i = 0; i < N; ++i)
    if (p[i] > 0.5) out.units.push_back(i);
  return out;
}

// Plain Lloyd k-means, then keep the unit nearest each centroid (each unit at
// most once). Returns the retained unit indices, ascending.
inline std::vector<int> kmeans_reduce(const Coords& coords, int k, std::uint64_t seed) {
  const int N = coords.size();
  require(k >= 1 && k <= N, Errc::BadInput, "need 1 <= k <= N");
  const int dim = coords.dim;
  Rng rng(seed);
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i)
    std::swap(idx[i], idx[i + static_cast<int>(rng.next_below(N - i))]);
  Coords means(dim, k);
  for (int c = 0; c < k; ++c)
    std::copy(coords.row(idx[c]), coords.row(idx[c]) + dim, means.row(c));

  std::vector<int> label(N, 0);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (int i = 0; i < N; ++i) {
      int best = 0;
      double bd = sq_dist(coords.row(i), means.row(0), dim);
      for (int c = 1; c < k; ++c) {
        double d = sq_dist(coords.row(i), means.row(c), dim);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (label[i] != best) {
        label[i] = best;
        changed = true;
      }
    }
    Coords next(dim, k);
    std::vector<int> cnt(k, 0);
    for (int i = 0; i < N; ++i) {
      cnt[label[i]] += 1;
      for (int d = 0; d < dim; ++d) next.at(label[i], d) += coords.at(i, d);
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] == 0) continue;  // keep the previous mean
      for (int d = 0; d < dim; ++d) means.at(c, d) = next.at(c, d) / cnt[c];
    }
    if (!changed) break;
  }

  std::vector<char> used(N, 0);
  std::vector<int> keep;
  for (int c = 0; c < k; ++c) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
      if (used[i]) continue;
      double d = sq_dist(coords.row(i), means.row(c), dim);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    used[best] = 1;
    keep.push_back(best);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

// ---------------------------------------------------------------------------
// Monte Carlo driver

struct SimulationConfig {
  PopulationSpec pop;
  std::optional<std::string> pop_csv;  // overrides the generated population
  std::string pop_csv_column = "pi";   // auxiliary size column, rescaled to pop.n
  std::vector<std::string> designs{"srs", "nms"};  // srs, lpm1, gfs-random, nms, gms
  std::vector<int> ns{4};
  int replicates = 1;
  std::vector<std::string> indices{"MI"};  // MI, VI, BI, DI
  int m = 4;
  RankingRule psi1 = RankingRule::CentroidalPolar;
  RankingRule psi2 = RankingRule::CentroidalPolar;
  SearchConfig gms;  // n is overridden per run
  std::uint64_t seed = 0;
};

inline SimulationConfig parse_simulation_config(const nlohmann::json& j) {
  SimulationConfig cfg;
  if (j.contains("population")) {
    const auto& p = j.at("population");
    if (p.contains("csv")) cfg.pop_csv = p.at("csv").get<std::string>();
    if (p.contains("column")) cfg.pop_csv_column = p.at("column").get<std::string>();
    if (p.contains("layout")) cfg.pop.layout = layout_kind_from_name(p.at("layout").get<std::string>());
    if (p.contains("N")) cfg.pop.N = p.at("N").get<int>();
    if (p.contains("n")) cfg.pop.n = p.at("n").get<int>();
    if (p.contains("prob")) {
      const std::string pm = p.at("prob").get<std::string>();
      if (pm == "EP") cfg.pop.prob = ProbMode::EP;
      else if (pm == "UP-gradient") cfg.pop.prob = ProbMode::UPGradient;
      else fail(Errc::BadInput, "unknown probability mode '" + pm + "'");
    }
    if (p.contains("offset")) cfg.pop.up_offset = p.at("offset").get<double>();
    if (p.contains("blobs")) cfg.pop.blobs = p.at("blobs").get<int>();
    if (p.contains("blobSd")) cfg.pop.blob_sd = p.at("blobSd").get<double>();
    if (p.contains("nsKappa")) cfg.pop.ns_kappa = p.at("nsKappa").get<double>();
    if (p.contains("nsMu")) cfg.pop.ns_mu = p.at("nsMu").get<double>();
    if (p.contains("nsSigma")) cfg.pop.ns_sigma = p.at("nsSigma").get<double>();
    if (p.contains("seed")) cfg.pop.seed = p.at("seed").get<std::uint64_t>();
  }
  if (j.contains("designs")) cfg.designs = j.at("designs").get<std::vector<std::string>>();
  if (j.contains("ns")) cfg.ns = j.at("ns").get<std::vector<int>>();
  if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
  if (j.contains("indices")) cfg.indices = j.at("indices").get<std::vector<std::string>>();
  if (j.contains("m")) cfg.m = j.at("m").get<int>();
  if (j.contains("psi1")) cfg.psi1 = ranking_rule_from_name(j.at("psi1").get<std::string>());
  if (j.contains("psi2")) cfg.psi2 = ranking_rule_from_name(j.at("psi2").get<std::string>());
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("gms")) {
    const auto& g = j.at("gms");
    if (g.contains("L")) cfg.gms.L = g.at("L").get<int>();
    if (g.contains("B")) cfg.gms.B = g.at("B").get<int>();
    if (g.contains("E")) cfg.gms.E = g.at("E").get<int>();
    if (g.contains("q")) cfg.gms.q = g.at("q").get<int>();
    if (g.contains("tau")) cfg.gms.tau = g.at("tau").get<double>();
    if (g.contains("guide")) cfg.gms.guide = guide_index_from_name(g.at("guide").get<std::string>());
  }
  require(cfg.replicates >= 1, Errc::BadInput, "need at least one replicate");
  return cfg;
}

struct RunReport {
  long rows = 0;
  long failures = 0;
  nlohmann::json summary;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

// Streams one row per (replicate, design, index) and accumulates boxplot
// statistics per (design, n, index). The BI presentation clip at 1.22 applies
// to the summary only; CSV rows keep raw values.
inline RunReport run_monte_carlo(const SimulationConfig& cfg, const Population& pop,
                                 std::ostream& rows_csv) {
  validate_population(pop);
  const int N = pop.size();
  RunReport rep;
  rows_csv << "replicate,design,n,index,value,status\n";

  std::map<std::string, std::vector<double>> groups;  // "design|n|index" -> values

  for (std::size_t di = 0; di < cfg.designs.size(); ++di) {
    const std::string& design = cfg.designs[di];
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
      const int n = cfg.ns[ni];
      require(n >= 1 && n < N, Errc::InfeasibleProbabilities, "need 1 <= n < N");

      // per-(design, n) population: EP designs keep pi; generated pi is reused
      Population run_pop = pop;
      {
        const double total = std::accumulate(pop.pi.begin(), pop.pi.end(), 0.0);
        if (std::abs(total - n) > 1e-9) {
          // rescale the existing pi profile to the requested size
          run_pop.pi = probabilities_from_sizes(pop.pi, n);
        }
      }

      std::optional<NmsDesign> fixed_design;
      if (design == "nms") {
        fixed_design = build_design(run_pop, n, cfg.m, cfg.psi1, cfg.psi2,
                                    derive_seed(cfg.seed, 0x6e6d'7300 + di * 64 + ni));
      } else if (design == "gms") {
        SearchConfig sc = cfg.gms;
        sc.n = n;
        sc.m = cfg.m;
        sc.seed = derive_seed(cfg.seed, 0x676d'7300 + di * 64 + ni);
        sc.exact_score = to_fixed12(run_pop.pi).has_value();
        fixed_design = greedy_search(run_pop, sc).best.design;
      } else {
        require(design == "srs" || design == "lpm1" || design == "gfs-random", Errc::BadInput,
                "unknown design '" + design + "'");
      }

      SpatialWeights weights;  // shared by every MI evaluation in this block
      bool need_mi = false;
      for (const auto& ix : cfg.indices) need_mi = need_mi || ix == "MI";
      if (need_mi) weights = build_weights_for_design(run_pop.coords, n);
      std::vector<std::vector<double>> xcols;
      for (const auto& ix : cfg.indices)
        if (ix == "BI" && xcols.empty()) xcols = default_balance_columns(run_pop);

      for (int r = 0; r < cfg.replicates; ++r) {
        const std::uint64_t rep_seed =
            derive_seed(cfg.seed, ((di * cfg.ns.size() + ni) * cfg.replicates) + r + 1);
        Rng rng(rep_seed);
        Sample s;
        try {
          if (design == "srs") {
            s = srs_sample(N, n, rng);
          } else if (design == "lpm1") {
            s = lpm1_sample(run_pop, rng);
          } else if (design == "gfs-random") {
            std::vector<int> order(N);
            std::iota(order.begin(), order.end(), 0);
            for (int i = 0; i + 1 < N; ++i)
              std::swap(order[i], order[i + static_cast<int>(rng.next_below(N - i))]);
            s = draw_sample(build_bars(run_pop, order), rng);
          } else {
            s = draw_sample(fixed_design->layout, rng);
          }
        } catch (const Error& e) {
          for (const auto& ix : cfg.indices) {
            rows_csv << (r + 1) << ',' << design << ',' << n << ',' << ix << ",,"
                     << errc_name(e.code) << '\n';
            ++rep.rows;
            ++rep.failures;
          }
          continue;
        }

        for (const auto& ix : cfg.indices) {
          double value = 0.0;
          const char* status = "ok";
          try {
            if (ix == "MI") value = moran_index(weights, s.units);
            else if (ix == "VI") value = voronoi_index(run_pop, s.units);
            else if (ix == "BI") value = balanced_voronoi_index(run_pop, s.units, xcols);
            else if (ix == "DI") value = density_disparity_index(run_pop, s.units).di;
            else fail(Errc::BadInput, "unknown index '" + ix + "'");
          } catch (const Error& e) {
            status = errc_name(e.code);
          }
          if (std::string(status) == "ok") {
            rows_csv << (r + 1) << ',' << design << ',' << n << ',' << ix << ','
                     << detail::fmt17(value) << ",ok\n";
            groups[design + "|" + std::to_string(n) + "|" + ix].push_back(value);
          } else {
            rows_csv << (r + 1) << ',' << design << ',' << n << ',' << ix << ",," << status << '\n';
            ++rep.failures;
          }
          ++rep.rows;
        }
      }
    }
  }

  nlohmann::json summary = nlohmann::json::array();
  for (auto& [key, vals] : groups) {
    const auto p1 = key.find('|');
    const auto p2 = key.find('|', p1 + 1);
    const std::string design = key.substr(0, p1);
    const int n = std::stoi(key.substr(p1 + 1, p2 - p1 - 1));
    const std::string ix = key.substr(p2 + 1);
    std::vector<double> v = vals;
    if (ix == "BI")
      for (double& x : v) x = std::min(x, 1.22);
    std::sort(v.begin(), v.end());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    summary.push_back({{"design", design},
                       {"n", n},
                       {"index", ix},
                       {"count", v.size()},
                       {"mean", mean},
                       {"min", v.front()},
                       {"q1", detail::quantile_sorted(v, 0.25)},
                       {"median", detail::quantile_sorted(v, 0.5)},
                       {"q3", detail::quantile_sorted(v, 0.75)},
                       {"max", v.back()}});
  }
  rep.summary = std::move(summary);
  return rep;
}

}  // namespace balsam

// Command-line front end: population generation, clustering, sampling,
// spread indices, design search, and the Monte Carlo harness.
//
// Exit codes: 0 success, 2 validation failure, 3 completed with partial
// failures (some simulation rows errored).

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "balsam/clustering.hpp"
#include "balsam/common.hpp"
#include "balsam/disparity.hpp"
#include "balsam/gfs.hpp"
#include "balsam/gms.hpp"
#include "balsam/harness.hpp"
#include "balsam/indices.hpp"
#include "balsam/nms.hpp"
#include "balsam/population.hpp"

namespace {

using namespace balsam;

// out == "-" writes to stdout
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) fail(Errc::BadInput, "cannot open output file '" + path + "'");
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

Population load_population(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::BadInput, "cannot open population file '" + path + "'");
  return read_population_csv(in);
}

std::vector<int> parse_units(const std::string& csv, int N) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    int u = std::stoi(tok);
    require(u >= 1 && u <= N, Errc::BadInput, "unit id " + tok + " out of range");
    out.push_back(u - 1);
  }
  require(!out.empty(), Errc::EmptySample, "no units given");
  return out;
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "csv";
};

int cmd_gen_pop(const GlobalOpts& g, const std::string& layout, int N, const std::string& prob,
                int n, double offset, int blobs, double blob_sd, double ns_kappa, double ns_mu,
                double ns_sigma, const std::string& csv, const std::string& column, int reduce) {
  if (!csv.empty()) {
    std::vector<double> raw;
    Population pop = read_population_csv_column_file(csv, column, n, &raw);
    if (reduce > 0) {
      // keep the unit nearest each k-means centroid, then rescale its sizes
      std::vector<int> keep = kmeans_reduce(pop.coords, reduce, g.seed);
      Population red;
      red.coords = pop.coords.select(keep);
      std::vector<double> kept_raw;
      for (int u : keep) kept_raw.push_back(raw[u]);
      red.pi = probabilities_from_sizes(kept_raw, n);
      pop = std::move(red);
      validate_population(pop);
    }
    OutStream os(g.out);
    write_population_csv(os.get(), pop);
    return 0;
  }
  PopulationSpec spec;
  spec.layout = layout_kind_from_name(layout);
  spec.N = N;
  spec.n = n;
  spec.up_offset = offset;
  spec.blobs = blobs;
  spec.blob_sd = blob_sd;
  spec.ns_kappa = ns_kappa;
  spec.ns_mu = ns_mu;
  spec.ns_sigma = ns_sigma;
  spec.seed = g.seed;
  if (prob == "EP") spec.prob = ProbMode::EP;
  else if (prob == "UP-gradient") spec.prob = ProbMode::UPGradient;
  else fail(Errc::BadInput, "unknown probability mode '" + prob + "'");

  Population pop = gen_population(spec);
  OutStream os(g.out);
  write_population_csv(os.get(), pop);
  return 0;
}

int cmd_cluster(const GlobalOpts& g, const std::string& pop_path, int n, double delta) {
  Population pop = load_population(pop_path);
  BalancedPartition part = up_balanced_clustering(pop, n, delta, nullptr, g.seed);
  if (g.format == "json") {
    OutStream os(g.out);
    write_partition_json(os.get(), part);
  } else {
    OutStream os(g.out);
    write_partition_csv(os.get(), part);
    if (g.out != "-") {
      std::ofstream side(g.out + ".json");
      write_partition_json(side, part);
    }
  }
  return 0;
}

int cmd_sample(const GlobalOpts& g, const std::string& pop_path, const std::string& design,
               int n, int m, const std::string& psi1, const std::string& psi2, double delta,
               std::optional<double> r_fixed, int count, const std::string& design_json_in,
               const std::string& design_json_out, const std::string& layout_csv) {
  Population pop = load_population(pop_path);
  const int N = pop.size();
  Rng rng(derive_seed(g.seed, 0x5a3f));

  std::optional<NmsDesign> nms;
  std::optional<BarLayout> layout;
  if (!design_json_in.empty()) {
    std::ifstream in(design_json_in);
    if (!in) fail(Errc::BadInput, "cannot open design file '" + design_json_in + "'");
    nms = read_design_json(in);
    layout = nms->layout;
  } else if (design == "nms") {
    nms = build_design(pop, n, m, ranking_rule_from_name(psi1), ranking_rule_from_name(psi2),
                       g.seed, delta);
    layout = nms->layout;
  } else if (design == "gfs-lex") {
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    layout = build_bars(pop, order);
  } else if (design == "gfs-random") {
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i + 1 < N; ++i)
      std::swap(order[i], order[i + static_cast<int>(rng.next_below(N - i))]);
    layout = build_bars(pop, order);
  } else if (design != "srs" && design != "lpm1") {
    fail(Errc::BadInput, "unknown design '" + design + "'");
  }

  if (!design_json_out.empty() && nms) {
    std::ofstream out(design_json_out);
    write_design_json(out, *nms);
  }
  if (!layout_csv.empty() && layout) {
    std::ofstream out(layout_csv);
    write_layout_csv(out, *layout);
  }

  std::vector<Sample> samples;
  for (int c = 0; c < count; ++c) {
    if (layout) {
      samples.push_back(r_fixed ? draw_sample(*layout, *r_fixed) : draw_sample(*layout, rng));
    } else if (design == "srs") {
      samples.push_back(srs_sample(N, n, rng));
    } else {
      samples.push_back(lpm1_sample(pop, rng));
    }
  }

  OutStream os(g.out);
  if (g.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const Sample& s : samples) {
      nlohmann::json row = nlohmann::json::array();
      for (int u : s.units) row.push_back(u + 1);
      j.push_back(std::move(row));
    }
    os.get() << j.dump(2) << '\n';
  } else {
    os.get() << "sample,unit\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (int u : samples[i].units) os.get() << (i + 1) << ',' << (u + 1) << '\n';
  }
  return 0;
}

int cmd_index(const GlobalOpts& g, const std::string& pop_path, const std::string& units_csv,
              const std::vector<std::string>& indices, const std::string& qkind,
              const std::string& di_report, const std::string& di_units) {
  Population pop = load_population(pop_path);
  std::vector<int> units = parse_units(units_csv, pop.size());

  nlohmann::json jout;
  OutStream os(g.out);
  if (g.format == "csv") os.get() << "index,value\n";
  for (const std::string& ix : indices) {
    double value = 0.0;
    if (ix == "MI") {
      SpatialWeights W = build_weights_for_design(pop.coords, static_cast<int>(units.size()));
      value = moran_index(W, units);
    } else if (ix == "VI") {
      value = voronoi_index(pop, units);
    } else if (ix == "BI") {
      QSpec q;
      if (qkind == "identity") q.kind = QSpec::Identity;
      else if (qkind == "gram") q.kind = QSpec::Gram;
      else fail(Errc::BadInput, "unknown metric '" + qkind + "'");
      value = balanced_voronoi_index(pop, units, default_balance_columns(pop), q);
    } else if (ix == "DI") {
      DisparityReport rep = density_disparity_index(pop, units);
      value = rep.di;
      if (!di_report.empty()) {
        std::ofstream out(di_report);
        write_disparity_json(out, rep);
      }
      if (!di_units.empty()) {
        std::ofstream out(di_units);
        write_disparity_units_csv(out, rep);
      }
    } else {
      fail(Errc::BadInput, "unknown index '" + ix + "'");
    }
    if (g.format == "csv") os.get() << ix << ',' << balsam::detail::fmt17(value) << '\n';
    else jout[ix] = value;
  }
  if (g.format == "json") os.get() << jout.dump(2) << '\n';
  return 0;
}

int cmd_search(const GlobalOpts& g, const std::string& pop_path, int n, int m, int L, int B,
               int E, int q, const std::string& guide, std::optional<double> tau, int mc,
               double delta, const std::string& trace_path) {
  Population pop = load_population(pop_path);
  SearchConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.L = L;
  cfg.B = B;
  cfg.E = E;
  cfg.q = q;
  cfg.guide = guide_index_from_name(guide);
  cfg.tau = tau;
  cfg.delta = delta;
  cfg.seed = g.seed;
  if (mc > 0) {
    cfg.exact_score = false;
    cfg.mc_draws = mc;
  } else {
    cfg.exact_score = to_fixed12(pop.pi).has_value();
    cfg.mc_draws = 10'000;
  }
  SearchResult res = greedy_search(pop, cfg);
  OutStream os(g.out);
  write_design_json(os.get(), res.best.design);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    write_trace_csv(out, res.trace);
  }
  std::cerr << "best score " << res.best.score << " after " << res.iterations << " iterations\n";
  return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::string& config_path, const std::string& rows_path,
                 const std::string& summary_path) {
  std::ifstream in(config_path);
  if (!in) fail(Errc::BadInput, "cannot open config file '" + config_path + "'");
  nlohmann::json j;
  in >> j;
  SimulationConfig cfg = parse_simulation_config(j);
  if (cfg.seed == 0) cfg.seed = g.seed;

  Population pop;
  if (cfg.pop_csv) {
    pop = cfg.pop_csv_column == "pi"
              ? load_population(*cfg.pop_csv)
              : read_population_csv_column_file(*cfg.pop_csv, cfg.pop_csv_column, cfg.pop.n);
  } else {
    pop = gen_population(cfg.pop);
  }

  OutStream rows(rows_path);
  RunReport rep = run_monte_carlo(cfg, pop, rows.get());
  {
    OutStream summary(summary_path);
    summary.get() << rep.summary.dump(2) << '\n';
  }
  std::cerr << rep.rows << " rows, " << rep.failures << " failures\n";
  return rep.failures > 0 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design-based spatial sampling toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may appear after the subcommand name

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out", g.out, "output path ('-' = stdout)");
  app.add_option("--format", g.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // gen-pop
  auto* gen = app.add_subcommand("gen-pop", "generate or import a population");
  std::string layout = "gridded", prob = "EP", gen_csv, gen_column = "pi";
  int N = 100, n = 4, blobs = 5;
  double offset = 0.0, blob_sd = 0.05, ns_kappa = 25.0, ns_mu = 41.0, ns_sigma = 0.03;
  int gen_reduce = 0;
  gen->add_option("--csv", gen_csv, "import an id,x,y,<aux> table instead of generating");
  gen->add_option("--column", gen_column, "auxiliary size column, rescaled so pi sums to n");
  gen->add_option("--reduce", gen_reduce, "reduce an imported table to this many units (k-means)");
  gen->add_option("--layout", layout, "gridded|random|clustered|neyman-scott|regular");
  gen->add_option("--N", N, "population size");
  gen->add_option("--prob", prob, "EP|UP-gradient");
  gen->add_option("--n", n, "target sample size (sum of probabilities)");
  gen->add_option("--offset", offset, "rank offset for UP-gradient");
  gen->add_option("--blobs", blobs, "blob count for clustered layout");
  gen->add_option("--blob-sd", blob_sd, "blob spread for clustered layout");
  gen->add_option("--ns-kappa", ns_kappa, "parent intensity");
  gen->add_option("--ns-mu", ns_mu, "offspring mean per parent");
  gen->add_option("--ns-sigma", ns_sigma, "offspring spread");

  // cluster
  auto* clu = app.add_subcommand("cluster", "balanced clustering of a population");
  std::string pop_path;
  double delta = 0.0;
  int cn = 4;
  clu->add_option("--pop", pop_path, "population CSV")->required();
  clu->add_option("--n", cn, "cluster count");
  clu->add_option("--delta", delta, "expansion step (0 = default)");

  // sample
  auto* smp = app.add_subcommand("sample", "draw samples from a design");
  std::string s_pop, s_design = "nms", s_psi1 = "CentroidalPolar", s_psi2 = "CentroidalPolar";
  std::string s_design_in, s_design_out, s_layout_csv;
  int s_n = 4, s_m = 4, s_count = 1;
  double s_delta = 0.0;
  double s_r = -1.0;
  smp->add_option("--pop", s_pop, "population CSV")->required();
  smp->add_option("--design", s_design, "nms|gfs-lex|gfs-random|srs|lpm1");
  smp->add_option("--n", s_n, "sample size");
  smp->add_option("--m", s_m, "zones per cluster");
  smp->add_option("--psi1", s_psi1, "zone ranking rule");
  smp->add_option("--psi2", s_psi2, "unit ranking rule");
  smp->add_option("--delta", s_delta, "expansion step (0 = default)");
  smp->add_option("--r", s_r, "fixed uniform draw in [0,1) (default: random)");
  smp->add_option("--count", s_count, "number of samples");
  smp->add_option("--design-json", s_design_in, "load a saved design instead of building one");
  smp->add_option("--save-design", s_design_out, "write the design JSON here");
  smp->add_option("--layout-csv", s_layout_csv, "write the bar layout CSV here");

  // index
  auto* idx = app.add_subcommand("index", "compute spread indices for a sample");
  std::string i_pop, i_units, i_q = "gram", i_di_report, i_di_units;
  std::vector<std::string> i_indices{"MI"};
  idx->add_option("--pop", i_pop, "population CSV")->required();
  idx->add_option("--sample", i_units, "comma-separated 1-based unit ids")->required();
  idx->add_option("--index", i_indices, "MI|VI|BI|DI (repeatable)");
  idx->add_option("--metric", i_q, "BI metric: gram|identity");
  idx->add_option("--di-report", i_di_report, "write the DI report JSON here");
  idx->add_option("--di-units", i_di_units, "write the DI per-unit CSV here");

  // search
  auto* sea = app.add_subcommand("search", "greedy design search");
  std::string g_pop, g_guide = "MI", g_trace;
  int g_n = 4, g_m = 4, g_L = 200, g_B = 8, g_E = 2, g_q = 4, g_mc = 0;
  double g_delta = 0.0, g_tau_val = 0.0;
  bool g_has_tau = false;
  sea->add_option("--pop", g_pop, "population CSV")->required();
  sea->add_option("--n", g_n, "sample size");
  sea->add_option("--m", g_m, "zones per cluster");
  sea->add_option("--L", g_L, "iteration limit");
  sea->add_option("--B", g_B, "children per expansion");
  sea->add_option("--E", g_E, "edits per child");
  sea->add_option("--q", g_q, "seed designs");
  sea->add_option("--guide", g_guide, "guiding index: MI|VI|BI|DI");
  sea->add_option("--tau", g_tau_val, "target score")->each([&](const std::string&) {
    g_has_tau = true;
  });
  sea->add_option("--mc", g_mc, "score by Monte Carlo with this many draws (0 = exact)");
  sea->add_option("--delta", g_delta, "expansion step (0 = default)");
  sea->add_option("--trace", g_trace, "write the trace CSV here");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo comparison runs");
  std::string config_path, rows_path = "rows.csv", summary_path = "summary.json";
  sim->add_option("--config", config_path, "simulation config JSON")->required();
  sim->add_option("--rows", rows_path, "per-replicate rows CSV path");
  sim->add_option("--summary", summary_path, "summary JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_pop(g, layout, N, prob, n, offset, blobs, blob_sd, ns_kappa, ns_mu, ns_sigma,
                         gen_csv, gen_column, gen_reduce);
    if (clu->parsed()) return cmd_cluster(g, pop_path, cn, delta);
    if (smp->parsed())
      return cmd_sample(g, s_pop, s_design, s_n, s_m, s_psi1, s_psi2, s_delta,
                        s_r >= 0.0 ? std::optional<double>(s_r) : std::nullopt, s_count,
                        s_design_in, s_design_out, s_layout_csv);
    if (idx->parsed()) return cmd_index(g, i_pop, i_units, i_indices, i_q, i_di_report, i_di_units);
    if (sea->parsed())
      return cmd_search(g, g_pop, g_n, g_m, g_L, g_B, g_E, g_q, g_guide,
                        g_has_tau ? std::optional<double>(g_tau_val) : std::nullopt, g_mc, g_delta,
                        g_trace);
    if (sim->parsed()) return cmd_simulate(g, config_path, rows_path, summary_path);
  } catch (const balsam::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

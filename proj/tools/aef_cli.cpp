// aef: command-line front end for graph building, scoring, simulation and
// the three experiments. Every subcommand writes into --out and leaves a
// provenance.json next to its outputs.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aef/aef.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <class T>
std::string opt_num(const std::optional<T>& x) {
  return x ? num(static_cast<double>(*x)) : std::string();
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw aef::Error("cannot read " + p.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aef::Error("cannot open " + path);
  return in;
}

// Output directory with a record of every file written and every input read.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    const auto p = dir_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw aef::Error("cannot write " + p.string());
    outputs_.push_back(name);
    return out;
  }

  void write_json(const std::string& name, const json& doc) {
    auto out = open(name);
    out << doc.dump(2) << '\n';
    if (!out) throw aef::Error("failed writing " + name);
  }

  void input(const std::string& path) {
    if (!path.empty()) inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
  }

  void finish(const std::string& subcommand, const json& config, std::uint64_t seed,
              const std::vector<std::string>& args) {
    json prov{{"tool", "aef"},
              {"version", aef::kVersion},
              {"subcommand", subcommand},
              {"arguments", args},
              {"config", config},
              {"rng_seed", seed},
              {"inputs", inputs_},
              {"outputs", outputs_}};
    std::ofstream out(dir_ / "provenance.json");
    out << prov.dump(2) << '\n';
    if (!out) throw aef::Error("failed writing provenance.json");
  }

 private:
  fs::path dir_;
  json inputs_ = json::array();
  std::vector<std::string> outputs_;
};

// Settings shared by the subcommands. Resolution order: built-in default,
// then --config, then explicit flags.
struct Settings {
  double beta = 0.8383;
  double epsilon = 1.0 / 1.1;
  double mu = 1.0 / 2.5;
  double p_asym = 0.33;
  double r_beta = 0.5;
  double p_travel_sym = 0.5;
  double rho = 0.7;
  double threshold_per_100k = 1.0;
  std::string criterion = "regions:3";
  std::size_t runs = 20;
  int max_days = 365;
  std::uint64_t rng_seed = 1;
  std::size_t workers = aef::default_workers();

  json to_json() const {
    return {{"beta", beta},
            {"epsilon", epsilon},
            {"mu", mu},
            {"p_asym", p_asym},
            {"r_beta", r_beta},
            {"p_travel_sym", p_travel_sym},
            {"rho", rho},
            {"threshold_per_100k", threshold_per_100k},
            {"criterion", criterion},
            {"runs", runs},
            {"max_days", max_days},
            {"rng_seed", rng_seed}};
  }

  aef::DiseaseModel disease() const {
    aef::DiseaseModel d;
    d.beta = beta;
    d.epsilon = epsilon;
    d.mu = mu;
    d.p_asym = p_asym;
    d.r_beta = r_beta;
    d.p_travel_sym = p_travel_sym;
    d.validate();
    return d;
  }

  aef::PandemicCriterion pandemic_criterion() const {
    const auto colon = criterion.find(':');
    const std::string kind = criterion.substr(0, colon);
    std::size_t count = kind == "cities" ? 100 : 3;
    if (colon != std::string::npos) count = std::stoul(criterion.substr(colon + 1));
    if (kind == "regions") return aef::PandemicCriterion::regions(count, threshold_per_100k);
    if (kind == "cities") return aef::PandemicCriterion::cities(count, threshold_per_100k);
    throw aef::Error("criterion must be regions[:N] or cities[:N], got '" + criterion + "'");
  }

  aef::EnsembleOptions ensemble() const {
    aef::EnsembleOptions o;
    o.runs = runs;
    o.simulation.max_days = max_days;
    o.simulation.criterion = pandemic_criterion();
    o.base_seed = rng_seed;
    o.workers = workers;
    return o;
  }
};

// Flag storage; a value is used only when its flag was given.
struct Flags {
  std::string config, out;
  Settings s;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory")->required();
  sub->add_option("--rng-seed", f.s.rng_seed, "base random seed");
  sub->add_option("--workers", f.s.workers, "worker threads")->check(CLI::PositiveNumber);
}

void add_disease(CLI::App* sub, Flags& f) {
  sub->add_option("--beta", f.s.beta, "transmission rate per day");
  sub->add_option("--epsilon", f.s.epsilon, "latency exit rate per day");
  sub->add_option("--mu", f.s.mu, "recovery rate per day");
  sub->add_option("--p-asym", f.s.p_asym, "share of asymptomatic infections");
  sub->add_option("--r-beta", f.s.r_beta, "relative infectiousness of asymptomatics");
  sub->add_option("--p-travel-sym", f.s.p_travel_sym, "share of symptomatics who travel");
  sub->add_option("--rho", f.s.rho, "seat occupancy factor");
  sub->add_option("--threshold", f.s.threshold_per_100k, "pandemic prevalence threshold per 100,000");
  sub->add_option("--criterion", f.s.criterion, "regions[:N] or cities[:N]");
  sub->add_option("--runs", f.s.runs, "runs per ensemble")->check(CLI::PositiveNumber);
  sub->add_option("--max-days", f.s.max_days, "simulation horizon in days")->check(CLI::PositiveNumber);
}

Settings resolve(const CLI::App* sub, const Flags& f, Settings base) {
  json cfg = json::object();
  if (!f.config.empty()) {
    auto in = open_input(f.config);
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw aef::Error("config " + f.config + ": " + e.what());
    }
    if (!cfg.is_object()) throw aef::Error("config " + f.config + " must hold a JSON object");
  }
  static const std::vector<std::string> known{"beta",  "epsilon",    "mu",   "p_asym",   "r_beta",  "p_travel_sym",
                                              "rho",   "threshold_per_100k", "criterion", "runs", "max_days",
                                              "rng_seed", "workers"};
  for (const auto& [key, value] : cfg.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw aef::Error("unknown config key '" + key + "'");
  auto pick = [&](auto& field, const auto& flag_value, const char* key, const char* flag) {
    using T = std::decay_t<decltype(field)>;
    try {
      if (cfg.contains(key)) field = cfg.at(key).template get<T>();
    } catch (const json::exception& e) {
      throw aef::Error(std::string("config key '") + key + "': " + e.what());
    }
    if (sub->get_option_no_throw(flag) && sub->count(flag) > 0) field = flag_value;
  };
  pick(base.beta, f.s.beta, "beta", "--beta");
  pick(base.epsilon, f.s.epsilon, "epsilon", "--epsilon");
  pick(base.mu, f.s.mu, "mu", "--mu");
  pick(base.p_asym, f.s.p_asym, "p_asym", "--p-asym");
  pick(base.r_beta, f.s.r_beta, "r_beta", "--r-beta");
  pick(base.p_travel_sym, f.s.p_travel_sym, "p_travel_sym", "--p-travel-sym");
  pick(base.rho, f.s.rho, "rho", "--rho");
  pick(base.threshold_per_100k, f.s.threshold_per_100k, "threshold_per_100k", "--threshold");
  pick(base.criterion, f.s.criterion, "criterion", "--criterion");
  pick(base.runs, f.s.runs, "runs", "--runs");
  pick(base.max_days, f.s.max_days, "max_days", "--max-days");
  pick(base.rng_seed, f.s.rng_seed, "rng_seed", "--rng-seed");
  pick(base.workers, f.s.workers, "workers", "--workers");
  if (base.runs < 1 || base.max_days < 1 || base.workers < 1) throw aef::Error("runs, max_days and workers must be positive");
  return base;
}

aef::WanGraph load_graph(const std::string& path, OutputDir& out, json* metadata = nullptr) {
  auto in = open_input(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw aef::Error("graph bundle " + path + ": " + e.what());
  }
  out.input(path);
  if (metadata) *metadata = doc.value("metadata", json::object());
  return aef::from_bundle(doc);
}

// Region table from --regions, else from the bundle's metadata, else the
// bundled default table.
aef::RegionTable load_regions(const std::string& path, const json& metadata, OutputDir& out) {
  if (path.empty() && metadata.contains("regions")) return aef::RegionTable(metadata.at("regions").get<std::map<std::string, int>>());
  const std::string p = path.empty() ? std::string(AEF_DEFAULT_DATA_DIR) + "/regions.tsv" : path;
  auto in = open_input(p);
  out.input(p);
  return aef::RegionTable::parse(in);
}

std::map<std::string, std::int64_t> load_populations(const std::string& path, OutputDir& out) {
  if (path.empty()) return {};
  auto in = open_input(path);
  out.input(path);
  return aef::parse_populations(in);
}

aef::NodeId require_airport(const aef::WanGraph& g, const std::string& iata) {
  auto u = g.find(iata);
  if (!u) throw aef::Error("airport " + iata + " is not in the graph");
  return *u;
}

std::vector<double> grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw aef::Error("grid needs step > 0 and max >= min");
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double x = lo + step * i;
    if (x > hi + 1e-9 * step) break;
    g.push_back(std::round(x * 1e9) / 1e9);
  }
  return g;
}

json correlation_json(const std::optional<aef::stats::CorrelationResult>& c) {
  if (!c) return nullptr;
  return {{"r", c->r}, {"ci_low", c->ci_low}, {"ci_high", c->ci_high}, {"n", c->n}};
}

// ---------------------------------------------------------------------------

struct BuildGraphArgs {
  std::string airports, routes, seats, seat_overrides;
  double default_seats = aef::SeatTable::kDefaultCapacity;
  std::size_t synthetic = 0;
  double synthetic_seat_scale = aef::SyntheticNetworkOptions{}.seat_scale;
};

json run_build_graph(const BuildGraphArgs& a, const Settings& s, OutputDir& out) {
  aef::WanGraph g;
  json summary;
  json metadata{{"tool", "aef"}, {"version", aef::kVersion}};
  if (a.synthetic > 0) {
    aef::SyntheticNetworkOptions opt;
    opt.nodes = a.synthetic;
    opt.seat_scale = a.synthetic_seat_scale;
    opt.seed = s.rng_seed;
    auto net = aef::synthetic_airline_network(opt);
    g = std::move(net.graph);
    std::map<std::string, int> regions;
    for (std::size_t r = 0; r < opt.regions; ++r) regions[aef::synthetic_country(r)] = static_cast<int>(r + 1);
    metadata["source"] = "synthetic";
    metadata["regions"] = regions;
    summary = {{"source", "synthetic"}, {"nodes", g.node_count()}, {"edges", g.edge_count()}};
  } else {
    if (a.airports.empty() || a.routes.empty()) throw aef::Error("--airports and --routes are required (or --synthetic)");
    auto ain = open_input(a.airports);
    auto rin = open_input(a.routes);
    const std::string seats_path = a.seats.empty() ? std::string(AEF_DEFAULT_DATA_DIR) + "/seats.tsv" : a.seats;
    auto sin = open_input(seats_path);
    out.input(a.airports);
    out.input(a.routes);
    out.input(seats_path);
    auto airports = aef::parse_airports(ain);
    auto routes = aef::parse_routes(rin, airports);
    auto seats = aef::SeatTable::parse(sin, a.default_seats);
    if (!a.seat_overrides.empty()) {
      auto oin = open_input(a.seat_overrides);
      out.input(a.seat_overrides);
      seats = seats.merged(aef::SeatTable::parse(oin, a.default_seats));
    }
    aef::BuildSummary b;
    g = aef::build_network(airports, routes.records, seats, &b);
    summary = {{"source", "openflights"},
               {"airports_read", airports.records.size()},
               {"airports_without_iata", airports.skipped_placeholder},
               {"airport_lines_rejected", airports.diagnostics.size()},
               {"routes_read", routes.records.size()},
               {"routes_unresolved", routes.dropped_unresolved},
               {"routes_self_loop", routes.dropped_self_loop},
               {"routes_without_equipment", b.routes_without_equipment},
               {"airports_without_routes", b.airports_without_routes},
               {"unknown_aircraft", b.unknown_aircraft},
               {"nodes", b.nodes},
               {"edges", b.edges}};
    for (const auto& d : airports.diagnostics) std::cerr << a.airports << ": " << d << '\n';
    for (const auto& d : routes.diagnostics) std::cerr << a.routes << ": " << d << '\n';
  }
  out.write_json("graph.json", aef::to_bundle(g, metadata));
  auto csv = out.open("edges.csv");
  aef::write_edge_list_csv(g, csv);
  out.write_json("summary.json", summary);
  std::cout << "graph: " << g.node_count() << " airports, " << g.edge_count() << " edges\n";
  return {{"synthetic_nodes", a.synthetic}, {"default_seats", a.default_seats}};
}

struct ScoresArgs {
  std::string graph;
  std::vector<std::string> iata;
};

void run_scores(const ScoresArgs& a, const Settings& s, OutputDir& out) {
  auto g = load_graph(a.graph, out);
  const auto aef_scores = aef::all_aef(g, s.workers);
  const auto c = aef::all_centralities(g, s.workers);
  std::vector<aef::NodeId> rows;
  if (a.iata.empty()) {
    for (aef::NodeId u = 0; u < g.node_count(); ++u) rows.push_back(u);
  } else {
    for (const auto& code : a.iata) rows.push_back(require_airport(g, code));
  }
  auto csv = out.open("scores.csv");
  csv << "iata,raw_aef,aef,degree,w_degree,eigen,w_eigen,betweenness,w_betweenness,clustering,w_clustering,t_core\n";
  json list = json::array();
  for (aef::NodeId u : rows) {
    csv << g.airport(u).iata << ',' << num(aef_scores[u].raw_entropy) << ',' << num(aef_scores[u].normalized) << ','
        << c.degree[u] << ',' << num(c.weighted_degree[u]) << ',' << num(c.eigenvector[u]) << ','
        << num(c.weighted_eigenvector[u]) << ',' << num(c.betweenness[u]) << ',' << num(c.weighted_betweenness[u])
        << ',' << num(c.clustering[u]) << ',' << num(c.weighted_clustering[u]) << ',' << c.t_core[u] << '\n';
    list.push_back({{"iata", g.airport(u).iata},
                    {"raw_aef", aef_scores[u].raw_entropy},
                    {"aef", aef_scores[u].normalized},
                    {"degenerate", aef_scores[u].degenerate}});
  }
  if (!csv) throw aef::Error("failed writing scores.csv");
  out.write_json("scores.json", list);
}

struct SimulateArgs {
  std::string graph, regions, populations, seed_airport;
};

void run_simulate(const SimulateArgs& a, const Settings& s, OutputDir& out) {
  json meta;
  auto g = std::make_shared<const aef::WanGraph>(load_graph(a.graph, out, &meta));
  auto world = aef::build_world(g, load_regions(a.regions, meta, out), load_populations(a.populations, out), s.rho);
  const auto seed = require_airport(*g, a.seed_airport);
  const auto disease = s.disease();
  std::vector<std::string> warnings;
  aef::seed_outbreak(world, seed, disease, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  auto opt = s.ensemble();
  opt.keep_outcomes = true;
  const auto summary = aef::run_ensemble(world, disease, seed, opt);
  auto runs = out.open("runs.csv");
  runs << "run,pandemic_day,peak_day\n";
  for (const auto& r : summary.runs) runs << r.run << ',' << opt_num(r.pandemic_day) << ',' << opt_num(r.peak_day) << '\n';
  for (std::size_t r = 0; r < summary.outcomes.size(); ++r) {
    char name[48];
    std::snprintf(name, sizeof name, "series/run_%03zu.csv", r);
    auto series = out.open(name);
    series << "day,region,prevalence_per_100k\n";
    const auto& prev = summary.outcomes[r].regional_prevalence;
    for (std::size_t d = 0; d < prev.size(); ++d)
      for (std::size_t k = 0; k < aef::kRegionCount; ++k) series << d + 1 << ',' << k + 1 << ',' << num(prev[d][k]) << '\n';
  }
  out.write_json("summary.json", {{"seed_airport", a.seed_airport},
                                  {"runs", summary.runs.size()},
                                  {"pandemic_runs", summary.pandemic_count()},
                                  {"median_pandemic_day", summary.median_pandemic_day ? json(*summary.median_pandemic_day) : json(nullptr)},
                                  {"median_peak_day", summary.median_peak_day ? json(*summary.median_peak_day) : json(nullptr)},
                                  {"warnings", warnings}});
  std::cout << a.seed_airport << ": " << summary.pandemic_count() << "/" << summary.runs.size() << " runs reached pandemic\n";
}

struct SweepArgs {
  std::string graph, regions, populations;
  std::vector<std::string> seeds;
  double beta_min = 0.40, beta_max = 0.50, beta_step = 0.01;
};

json run_sweep(const SweepArgs& a, const Settings& s, OutputDir& out) {
  json meta;
  auto g = std::make_shared<const aef::WanGraph>(load_graph(a.graph, out, &meta));
  auto world = aef::build_world(g, load_regions(a.regions, meta, out), load_populations(a.populations, out), s.rho);
  const auto scores = aef::all_aef(*g, s.workers);
  std::vector<aef::NodeId> seeds;
  std::vector<std::string> notes;
  if (a.seeds.empty()) {
    aef::Rng rng = aef::derive_rng(s.rng_seed, "decile-seeds");
    auto sel = aef::select_decile_seeds(scores, rng);
    seeds = sel.seeds;
    notes = sel.notes;
  } else {
    for (const auto& code : a.seeds) seeds.push_back(require_airport(*g, code));
  }
  auto disease = aef::DiseaseModel::simple_seir(s.beta);
  disease.epsilon = s.epsilon;
  disease.mu = s.mu;
  const auto betas = grid(a.beta_min, a.beta_max, a.beta_step);
  const auto sweep = aef::invasion_threshold_sweep(world, seeds, betas, disease, s.ensemble());

  auto csv = out.open("sweep.csv");
  csv << "iata,aef,beta,pandemic_runs,pandemic,median_pandemic_day\n";
  auto th = out.open("thresholds.csv");
  th << "iata,aef,minimal_beta\n";
  std::vector<double> x, y;
  json flagged = json::array();
  for (const auto& row : sweep) {
    const auto& code = g->airport(row.seed).iata;
    for (const auto& p : row.points)
      csv << code << ',' << num(scores[row.seed].normalized) << ',' << num(p.beta) << ',' << p.pandemic_runs << ','
          << (p.pandemic ? 1 : 0) << ',' << opt_num(p.median_pandemic_day) << '\n';
    th << code << ',' << num(scores[row.seed].normalized) << ',' << opt_num(row.minimal_beta) << '\n';
    if (row.minimal_beta) {
      x.push_back(scores[row.seed].normalized);
      y.push_back(*row.minimal_beta);
    } else {
      flagged.push_back(code);
    }
  }
  std::optional<aef::stats::CorrelationResult> r;
  if (x.size() >= 4) r = aef::try_pearson(x, y);
  out.write_json("report.json", {{"seeds", seeds.size()},
                                 {"selection_notes", notes},
                                 {"never_pandemic", flagged},
                                 {"pearson_aef_minimal_beta", correlation_json(r)}});
  return {{"beta_min", a.beta_min}, {"beta_max", a.beta_max}, {"beta_step", a.beta_step}};
}

struct TtpArgs {
  std::string graph, regions, populations;
  std::size_t seed_count = 100;
};

json run_time_to_pandemic(const TtpArgs& a, const Settings& s, OutputDir& out) {
  json meta;
  auto g = std::make_shared<const aef::WanGraph>(load_graph(a.graph, out, &meta));
  auto world = aef::build_world(g, load_regions(a.regions, meta, out), load_populations(a.populations, out), s.rho);
  const auto scores = aef::all_aef(*g, s.workers);
  const auto cent = aef::all_centralities(*g, s.workers);
  const auto seeds = aef::select_range_covering_seeds(scores, std::min(a.seed_count, g->node_count()));
  const auto rep = aef::time_to_pandemic_study(world, seeds, s.disease(), scores, cent, s.ensemble());

  auto csv = out.open("seeds.csv");
  csv << "iata,aef,pandemic_runs,median_pandemic_day,median_peak_day\n";
  for (const auto& r : rep.rows)
    csv << g->airport(r.seed).iata << ',' << num(scores[r.seed].normalized) << ',' << r.pandemic_runs << ','
        << opt_num(r.median_pandemic_day) << ',' << opt_num(r.median_peak_day) << '\n';
  auto corr = out.open("correlations.csv");
  corr << "measure,r_pandemic,ci_low_pandemic,ci_high_pandemic,r_peak,ci_low_peak,ci_high_peak\n";
  json table = json::array();
  for (const auto& c : rep.correlations) {
    auto cell = [](const auto& x) {
      return x ? num(x->r) + ',' + num(x->ci_low) + ',' + num(x->ci_high) : std::string(",,");
    };
    corr << '"' << c.measure << "\"," << cell(c.pandemic) << ',' << cell(c.peak) << '\n';
    table.push_back({{"measure", c.measure}, {"pandemic", correlation_json(c.pandemic)}, {"peak", correlation_json(c.peak)}});
  }
  json excluded = json::array();
  for (auto u : rep.excluded) excluded.push_back(g->airport(u).iata);
  auto sw = [](const auto& x) -> json {
    if (!x) return nullptr;
    return {{"w", x->w}, {"p_value", x->p_value}};
  };
  out.write_json("report.json", {{"seeds", seeds.size()},
                                 {"excluded_without_pandemic", excluded},
                                 {"correlations", table},
                                 {"shapiro_wilk_pandemic_day", sw(rep.pandemic_normality)},
                                 {"shapiro_wilk_peak_day", sw(rep.peak_normality)}});
  return {{"seed_count", a.seed_count}};
}

struct RobustnessArgs {
  std::string graph, country = "United States";
  std::vector<double> fractions;
  std::vector<std::string> schemes{"uniform", "degree", "aef"};
  std::size_t repeats = 10;
};

json run_robustness(const RobustnessArgs& a, const Settings& s, OutputDir& out) {
  auto g = load_graph(a.graph, out);
  const auto raw = aef::all_expected_force(g, s.workers);
  aef::RobustnessOptions opt;
  opt.country = a.country;
  opt.fractions = a.fractions;
  opt.schemes.clear();
  for (const auto& name : a.schemes) opt.schemes.push_back(aef::parse_removal_scheme(name));
  opt.repeats = a.repeats;
  opt.base_seed = s.rng_seed;
  opt.workers = s.workers;
  const auto rows = aef::robustness_study(g, raw, opt);
  auto csv = out.open("robustness.csv");
  csv << "fraction,scheme,repeats,removed,subset_compared,other_compared,subset_over_1pct,subset_over_5pct,"
         "other_over_1pct,other_over_5pct\n";
  for (const auto& r : rows)
    csv << num(r.fraction) << ',' << aef::to_string(r.scheme) << ',' << r.repeats << ',' << num(r.removed) << ','
        << num(r.subset_compared) << ',' << num(r.other_compared) << ',' << num(r.subset_share_over_1pct()) << ','
        << num(r.subset_share_over_5pct()) << ',' << num(r.other_share_over_1pct()) << ','
        << num(r.other_share_over_5pct()) << '\n';
  if (!csv) throw aef::Error("failed writing robustness.csv");
  return {{"country", a.country}, {"fractions", opt.fractions}, {"schemes", a.schemes}, {"repeats", a.repeats}};
}

struct BranchingArgs {
  aef::BranchingOptions opt;
  double r0_min = 1.0, r0_max = 3.0, r0_step = 0.1;
};

json run_branching(BranchingArgs a, const Settings& s, OutputDir& out) {
  a.opt.base_seed = s.rng_seed;
  a.opt.workers = s.workers;
  const auto r0 = grid(a.r0_min, a.r0_max, a.r0_step);
  const auto points = aef::branching_figure(r0, a.opt);
  auto csv = out.open("branching.csv");
  csv << "r0,analytic,dot,fraction\n";
  for (const auto& p : points)
    for (std::size_t d = 0; d < p.dots.size(); ++d)
      csv << num(p.r0) << ',' << num(p.analytic) << ',' << d << ',' << num(p.dots[d]) << '\n';
  if (!csv) throw aef::Error("failed writing branching.csv");
  return {{"population", a.opt.population},
          {"dots_per_r0", a.opt.dots_per_r0},
          {"trials_per_dot", a.opt.trials_per_dot},
          {"major_threshold", a.opt.major_threshold},
          {"r0_grid", r0}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airport Expected Force toolkit"};
  app.set_version_flag("--version", aef::kVersion);
  app.require_subcommand(1);
  Flags flags;

  BuildGraphArgs bg;
  auto* build = app.add_subcommand("build-graph", "build the seat-weighted airline network");
  add_common(build, flags);
  build->add_option("--airports", bg.airports, "OpenFlights airports.dat");
  build->add_option("--routes", bg.routes, "OpenFlights routes.dat");
  build->add_option("--seats", bg.seats, "seat table TSV (default: bundled)");
  build->add_option("--seat-overrides", bg.seat_overrides, "seat table TSV whose entries win");
  build->add_option("--default-seats", bg.default_seats, "capacity for unknown aircraft codes");
  build->add_option("--synthetic", bg.synthetic, "generate a synthetic network with this many airports instead");
  build->add_option("--synthetic-seat-scale", bg.synthetic_seat_scale, "seats per sqrt(k_u k_v) on synthetic edges");

  ScoresArgs sc;
  auto* scores = app.add_subcommand("scores", "AEF and centrality measures per airport");
  add_common(scores, flags);
  scores->add_option("--graph", sc.graph, "graph bundle (graph.json)")->required();
  scores->add_option("--iata", sc.iata, "only these airports")->delimiter(',');

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "ensemble of outbreaks from one airport");
  add_common(simulate, flags);
  add_disease(simulate, flags);
  simulate->add_option("--graph", sim.graph, "graph bundle")->required();
  simulate->add_option("--regions", sim.regions, "country to region TSV");
  simulate->add_option("--populations", sim.populations, "iata,population CSV");
  simulate->add_option("--seed-airport", sim.seed_airport, "IATA code of the outbreak origin")->required();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep-beta", "invasion threshold sweep over beta");
  add_common(sweep, flags);
  add_disease(sweep, flags);
  sweep->add_option("--graph", sw.graph, "graph bundle")->required();
  sweep->add_option("--regions", sw.regions, "country to region TSV");
  sweep->add_option("--populations", sw.populations, "iata,population CSV");
  sweep->add_option("--seeds", sw.seeds, "seed airports (default: one per AEF decile)")->delimiter(',');
  sweep->add_option("--beta-min", sw.beta_min);
  sweep->add_option("--beta-max", sw.beta_max);
  sweep->add_option("--beta-step", sw.beta_step);

  TtpArgs tt;
  auto* ttp = app.add_subcommand("time-to-pandemic", "pandemic and peak days against every measure");
  add_common(ttp, flags);
  add_disease(ttp, flags);
  ttp->add_option("--graph", tt.graph, "graph bundle")->required();
  ttp->add_option("--regions", tt.regions, "country to region TSV");
  ttp->add_option("--populations", tt.populations, "iata,population CSV");
  ttp->add_option("--seed-count", tt.seed_count, "airports spread over the AEF range")->check(CLI::PositiveNumber);

  RobustnessArgs rb;
  auto* robust = app.add_subcommand("robustness", "AEF stability under airport removal");
  add_common(robust, flags);
  robust->add_option("--graph", rb.graph, "graph bundle")->required();
  robust->add_option("--country", rb.country, "country whose airports are removed");
  robust->add_option("--fractions", rb.fractions, "removal fractions (default 0.01..0.15)")->delimiter(',');
  robust->add_option("--schemes", rb.schemes, "uniform, degree, aef")->delimiter(',');
  robust->add_option("--repeats", rb.repeats)->check(CLI::PositiveNumber);

  BranchingArgs br;
  auto* branch = app.add_subcommand("branching", "Reed-Frost outbreak probability against R0");
  add_common(branch, flags);
  branch->add_option("--population", br.opt.population);
  branch->add_option("--dots", br.opt.dots_per_r0);
  branch->add_option("--trials", br.opt.trials_per_dot);
  branch->add_option("--major-threshold", br.opt.major_threshold);
  branch->add_option("--r0-min", br.r0_min);
  branch->add_option("--r0-max", br.r0_max);
  branch->add_option("--r0-step", br.r0_step);

  CLI11_PARSE(app, argc, argv);
  const std::vector<std::string> args(argv + 1, argv + argc);

  try {
    auto* sub = app.get_subcommands().front();
    Settings defaults;
    if (sub == sweep) {
      defaults.p_asym = 0.0;
      defaults.p_travel_sym = 1.0;
    }
    const Settings s = resolve(sub, flags, defaults);
    OutputDir out(flags.out);
    if (!flags.config.empty()) out.input(flags.config);
    json config = s.to_json();
    json extra;
    if (sub == build) extra = run_build_graph(bg, s, out);
    if (sub == scores) run_scores(sc, s, out);
    if (sub == simulate) run_simulate(sim, s, out);
    if (sub == sweep) extra = run_sweep(sw, s, out);
    if (sub == ttp) extra = run_time_to_pandemic(tt, s, out);
    if (sub == robust) extra = run_robustness(rb, s, out);
    if (sub == branch) extra = run_branching(br, s, out);
    if (extra.is_object()) config.update(extra);
    out.finish(sub->get_name(), config, s.rng_seed, args);
  } catch (const std::exception& e) {
    std::cerr << "aef: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

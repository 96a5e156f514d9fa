#pragma once

// Stochastic metapopulation SEIR model over the airline network.
//
// Each airport hosts a well-mixed subpopulation with compartments
// S, E, I_asym, I_sym_travel, I_sym_stay, R. A simulated day is a travel phase
// (individuals hop along edges, seat capacity scaled by an occupancy factor)
// followed by a chain-binomial epidemic phase at every airport.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aef/error.hpp"
#include "aef/graph.hpp"
#include "aef/openflights.hpp"
#include "aef/parallel.hpp"
#include "aef/random.hpp"
#include "aef/stats.hpp"

namespace aef {

inline constexpr std::size_t kRegionCount = 16;

struct DiseaseModel {
  double beta = 0.8383;          // transmission rate, 1/day
  double epsilon = 1.0 / 1.1;    // latency exit rate, 1/day
  double mu = 1.0 / 2.5;         // recovery rate, 1/day
  double p_asym = 0.0;           // share of infections that are asymptomatic
  double r_beta = 0.5;           // relative infectiousness of asymptomatics
  double p_travel_sym = 1.0;     // share of symptomatic cases that keep travelling

  // One infectious class: everyone symptomatic and travelling.
  static DiseaseModel simple_seir(double beta) {
    DiseaseModel d;
    d.beta = beta;
    d.p_asym = 0.0;
    d.p_travel_sym = 1.0;
    return d;
  }

  // Three infectious classes with the 2009-influenza parameterisation.
  static DiseaseModel influenza_2009(double beta = 0.8383) {
    DiseaseModel d;
    d.beta = beta;
    d.p_asym = 0.33;
    d.r_beta = 0.5;
    d.p_travel_sym = 0.5;
    return d;
  }

  double r0() const noexcept { return beta / mu; }
  bool is_simple() const noexcept { return p_asym == 0.0 && p_travel_sym == 1.0; }

  // Probabilities that a new infectious case is asymptomatic, symptomatic and
  // travelling, symptomatic and staying put.
  std::array<double, 3> class_split() const noexcept {
    return {p_asym, (1.0 - p_asym) * p_travel_sym, (1.0 - p_asym) * (1.0 - p_travel_sym)};
  }

  void validate() const {
    if (!(beta >= 0.0) || !(epsilon > 0.0) || !(mu > 0.0)) throw Error("disease rates must be positive");
    for (double p : {p_asym, r_beta, p_travel_sym})
      if (!(p >= 0.0 && p <= 1.0)) throw Error("disease probabilities must lie in [0, 1]");
  }
};

struct Compartments {
  std::int64_t S = 0;
  std::int64_t E = 0;
  std::int64_t I_asym = 0;
  std::int64_t I_sym_travel = 0;
  std::int64_t I_sym_stay = 0;
  std::int64_t R = 0;

  std::int64_t total() const noexcept { return S + E + I_asym + I_sym_travel + I_sym_stay + R; }
  std::int64_t infectious() const noexcept { return I_asym + I_sym_travel + I_sym_stay; }

  friend bool operator==(const Compartments&, const Compartments&) = default;
};

// Country name -> region id in [1, 16].
class RegionTable {
 public:
  RegionTable() = default;
  explicit RegionTable(std::map<std::string, int> regions) : regions_(std::move(regions)) {
    for (const auto& [country, id] : regions_)
      if (id < 1 || id > static_cast<int>(kRegionCount))
        throw Error("region id for '" + country + "' outside 1.." + std::to_string(kRegionCount));
  }

  // Tab-separated `country<TAB>region`, '#' starts a comment line.
  static RegionTable parse(std::istream& in) {
    std::map<std::string, int> regions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto tab = t.rfind('\t');
      if (tab == std::string_view::npos) throw ParseError(line_no, "expected country<TAB>region");
      auto value = detail::trim(t.substr(tab + 1));
      int id = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), id);
      if (ec != std::errc() || ptr != value.data() + value.size()) throw ParseError(line_no, "region id must be an integer");
      regions[std::string(detail::trim(t.substr(0, tab)))] = id;
    }
    return RegionTable(std::move(regions));
  }

  std::optional<int> find(const std::string& country) const {
    auto it = regions_.find(country);
    if (it == regions_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return regions_.size(); }

 private:
  std::map<std::string, int> regions_;
};

// IATA -> population, read from `iata,population` lines (header optional).
inline std::map<std::string, std::int64_t> parse_populations(std::istream& in) {
  std::map<std::string, std::int64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto f = split_csv_line(line, line_no);
    if (f.size() != 2) throw ParseError(line_no, "expected iata,population");
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), n);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size()) {
      if (line_no == 1) continue;  // header
      throw ParseError(line_no, "population must be an integer");
    }
    if (n <= 0) throw ParseError(line_no, "population must be positive");
    out[f[0]] = n;
  }
  return out;
}

// Catchment population inferred from traffic: max(floor(strength * 2000), 50000).
inline std::int64_t synthesized_population(double weighted_degree) {
  return std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(weighted_degree * 2000.0)), 50000);
}

struct World {
  std::shared_ptr<const WanGraph> graph;
  std::vector<Compartments> cells;  // one per airport, indexed by node id
  std::vector<int> region;          // 1..16 per airport
  double rho = 0.7;                 // seat occupancy factor

  std::int64_t total_population() const {
    std::int64_t n = 0;
    for (const auto& c : cells) n += c.total();
    return n;
  }
};

// All-susceptible world. Populations come from `populations` where listed and
// from synthesized_population otherwise. Throws listing every airport country
// missing from the region table.
inline World build_world(std::shared_ptr<const WanGraph> graph, const RegionTable& regions,
                         const std::map<std::string, std::int64_t>& populations = {}, double rho = 0.7) {
  if (!graph || graph->empty()) throw Error("world needs a non-empty graph");
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error("occupancy factor must lie in [0, 1]");
  World w;
  w.rho = rho;
  w.cells.resize(graph->node_count());
  w.region.resize(graph->node_count());
  std::set<std::string> missing;
  for (NodeId u = 0; u < graph->node_count(); ++u) {
    const auto& a = graph->airport(u);
    if (auto r = regions.find(a.country)) {
      w.region[u] = *r;
    } else {
      missing.insert(a.country);
    }
    auto it = populations.find(a.iata);
    const std::int64_t n = it != populations.end() ? it->second : synthesized_population(graph->strength(u));
    if (n <= 0) throw Error("population of " + a.iata + " must be positive");
    w.cells[u].S = n;
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& c : missing) list += (list.empty() ? "" : ", ") + ("'" + c + "'");
    throw Error("countries without a region: " + list);
  }
  w.graph = std::move(graph);
  return w;
}

namespace detail {

// Largest-remainder apportionment of `total` over `shares` (summing to 1).
// Ties in the remainder go to the later class.
inline std::array<std::int64_t, 3> apportion(std::int64_t total, const std::array<double, 3>& shares) {
  std::array<std::int64_t, 3> out{};
  std::array<double, 3> rem{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double q = static_cast<double>(total) * shares[i];
    out[i] = static_cast<std::int64_t>(std::floor(q + 1e-9));
    rem[i] = q - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::array<std::size_t, 3> order{2, 1, 0};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-9; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % 3, ++assigned) ++out[order[k]];
  return out;
}

inline std::int64_t binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::int64_t>(n, p)(rng);
}

}  // namespace detail

// Moves floor(10% of N) susceptibles at `airport` into the infectious classes,
// apportioned by the disease's class split. `warnings` receives a note when
// the seed population is too small to infect anyone.
inline World seed_outbreak(World world, NodeId airport, const DiseaseModel& disease,
                           std::vector<std::string>* warnings = nullptr) {
  if (airport >= world.cells.size()) throw Error("seed airport out of range");
  auto& c = world.cells[airport];
  const std::int64_t n = c.total();
  const std::int64_t infected = std::min<std::int64_t>(n / 10, c.S);
  if (infected == 0 && warnings)
    warnings->push_back("seed population of " + world.graph->airport(airport).iata + " too small: nobody infected");
  auto parts = detail::apportion(infected, disease.class_split());
  c.S -= infected;
  c.I_asym += parts[0];
  c.I_sym_travel += parts[1];
  c.I_sym_stay += parts[2];
  return world;
}

struct DayTotals {
  std::int64_t new_infections = 0;  // S -> E across all airports
  std::int64_t exposed = 0;
  std::int64_t infectious = 0;
};

// Scratch buffers for step_day; reuse across days to avoid reallocation.
struct StepBuffers {
  std::vector<Compartments> inflow;
  std::vector<double> probs;
};

// Advances the world by one day in place.
inline DayTotals advance_day(World& world, const DiseaseModel& disease, Rng& rng, StepBuffers& buf) {
  const WanGraph& g = *world.graph;
  const std::size_t n = g.node_count();
  buf.inflow.assign(n, Compartments{});

  // Travel. Every travel-eligible individual leaves for neighbour l with
  // probability min(1, rho * w / N); the destination draw is multinomial.
  if (world.rho > 0.0) {
    for (NodeId k = 0; k < n; ++k) {
      auto& cell = world.cells[k];
      const std::int64_t pop = cell.total();
      if (pop == 0) continue;
      const auto nb = g.neighbors(k);
      const auto w = g.neighbor_weights(k);
      buf.probs.resize(nb.size());
      double leave = 0.0;
      for (std::size_t i = 0; i < nb.size(); ++i) {
        buf.probs[i] = std::min(1.0, world.rho * w[i] / static_cast<double>(pop));
        leave += buf.probs[i];
      }
      if (leave > 1.0) {
        for (double& p : buf.probs) p /= leave;
        leave = 1.0;
      }
      auto move = [&](std::int64_t Compartments::*field) {
        std::int64_t remaining = cell.*field;
        if (remaining == 0) return;
        double mass = 1.0;
        for (std::size_t i = 0; i < nb.size() && remaining > 0; ++i) {
          const double p = buf.probs[i];
          const std::int64_t go = detail::binomial(rng, remaining, mass > 0.0 ? p / mass : 1.0);
          buf.inflow[nb[i]].*field += go;
          remaining -= go;
          mass -= p;
        }
        cell.*field = remaining;
      };
      move(&Compartments::S);
      move(&Compartments::E);
      move(&Compartments::I_asym);
      move(&Compartments::I_sym_travel);
      move(&Compartments::R);
    }
    for (NodeId k = 0; k < n; ++k) {
      auto& c = world.cells[k];
      const auto& in = buf.inflow[k];
      c.S += in.S;
      c.E += in.E;
      c.I_asym += in.I_asym;
      c.I_sym_travel += in.I_sym_travel;
      c.R += in.R;
    }
  }

  // Epidemic phase.
  DayTotals totals;
  const double p_onset = 1.0 - std::exp(-disease.epsilon);
  const double p_recover = 1.0 - std::exp(-disease.mu);
  const auto split = disease.class_split();
  for (NodeId k = 0; k < n; ++k) {
    auto& c = world.cells[k];
    const std::int64_t pop = c.total();
    if (c.E == 0 && c.infectious() == 0) continue;
    const double load = static_cast<double>(c.I_sym_travel + c.I_sym_stay) + disease.r_beta * static_cast<double>(c.I_asym);
    const double lambda = pop > 0 ? disease.beta * load / static_cast<double>(pop) : 0.0;
    const std::int64_t exposed = detail::binomial(rng, c.S, 1.0 - std::exp(-lambda));
    const std::int64_t onset = detail::binomial(rng, c.E, p_onset);
    const std::int64_t onset_asym = detail::binomial(rng, onset, split[0]);
    const std::int64_t onset_travel =
        detail::binomial(rng, onset - onset_asym, split[0] < 1.0 ? split[1] / (1.0 - split[0]) : 0.0);
    const std::int64_t onset_stay = onset - onset_asym - onset_travel;
    const std::int64_t rec_asym = detail::binomial(rng, c.I_asym, p_recover);
    const std::int64_t rec_travel = detail::binomial(rng, c.I_sym_travel, p_recover);
    const std::int64_t rec_stay = detail::binomial(rng, c.I_sym_stay, p_recover);
    c.S -= exposed;
    c.E += exposed - onset;
    c.I_asym += onset_asym - rec_asym;
    c.I_sym_travel += onset_travel - rec_travel;
    c.I_sym_stay += onset_stay - rec_stay;
    c.R += rec_asym + rec_travel + rec_stay;
    totals.new_infections += exposed;
    totals.exposed += c.E;
    totals.infectious += c.infectious();
  }
  return totals;
}

// Value-returning form of advance_day.
inline World step_day(World world, const DiseaseModel& disease, Rng& rng) {
  StepBuffers buf;
  advance_day(world, disease, rng, buf);
  return world;
}

struct PandemicCriterion {
  enum class Kind { Regions, Cities };
  Kind kind = Kind::Regions;
  std::size_t count = 3;               // regions (or cities) that must exceed the threshold
  double threshold_per_100k = 1.0;     // prevalence threshold

  static PandemicCriterion regions(std::size_t n = 3, double threshold = 1.0) {
    return {Kind::Regions, n, threshold};
  }
  static PandemicCriterion cities(std::size_t n = 100, double threshold = 1.0) {
    return {Kind::Cities, n, threshold};
  }
};

struct SimulationOutcome {
  // Day d (1-based) is stored at index d - 1.
  std::vector<std::array<double, kRegionCount>> regional_prevalence;  // infectious per 100,000
  std::vector<std::vector<double>> city_prevalence;                    // only when recorded
  std::vector<std::int64_t> global_incidence;                          // new infections per day
  std::optional<int> pandemic_day;
  std::optional<int> peak_day;  // none when nobody was ever infected after seeding

  int days() const noexcept { return static_cast<int>(global_incidence.size()); }
};

// First day on which the criterion holds, or none. Prevalence counts the
// infectious compartments only.
inline std::optional<int> detect_pandemic(const SimulationOutcome& outcome, const PandemicCriterion& criterion) {
  if (!(criterion.threshold_per_100k > 0.0)) throw Error("pandemic threshold must be positive");
  const bool by_city = criterion.kind == PandemicCriterion::Kind::Cities;
  if (by_city && outcome.city_prevalence.empty() && !outcome.regional_prevalence.empty())
    throw Error("city criterion requires recorded city prevalence");
  const std::size_t days = by_city ? outcome.city_prevalence.size() : outcome.regional_prevalence.size();
  for (std::size_t d = 0; d < days; ++d) {
    std::size_t above = 0;
    if (by_city) {
      for (double p : outcome.city_prevalence[d]) above += p > criterion.threshold_per_100k;
    } else {
      for (double p : outcome.regional_prevalence[d]) above += p > criterion.threshold_per_100k;
    }
    if (above >= criterion.count) return static_cast<int>(d + 1);
  }
  return std::nullopt;
}

struct SimulationOptions {
  int max_days = 365;
  PandemicCriterion criterion;
  bool record_cities = false;
  bool stop_at_pandemic = false;  // skip the rest once pandemic status is reached
};

namespace detail {

inline void record_prevalence(const World& world, SimulationOutcome& out, bool cities) {
  std::array<double, kRegionCount> inf{};
  std::array<double, kRegionCount> pop{};
  for (std::size_t k = 0; k < world.cells.size(); ++k) {
    const auto r = static_cast<std::size_t>(world.region[k] - 1);
    inf[r] += static_cast<double>(world.cells[k].infectious());
    pop[r] += static_cast<double>(world.cells[k].total());
  }
  std::array<double, kRegionCount> prev{};
  for (std::size_t r = 0; r < kRegionCount; ++r) prev[r] = pop[r] > 0.0 ? inf[r] / pop[r] * 1e5 : 0.0;
  out.regional_prevalence.push_back(prev);
  if (cities) {
    std::vector<double> c(world.cells.size());
    for (std::size_t k = 0; k < world.cells.size(); ++k) {
      const double n = static_cast<double>(world.cells[k].total());
      c[k] = n > 0.0 ? static_cast<double>(world.cells[k].infectious()) / n * 1e5 : 0.0;
    }
    out.city_prevalence.push_back(std::move(c));
  }
}

}  // namespace detail

// One stochastic run from an already seeded world. Stops early once no one is
// exposed or infectious, or (optionally) at pandemic status.
inline SimulationOutcome simulate(World world, const DiseaseModel& disease, Rng& rng,
                                  const SimulationOptions& opt = {}) {
  disease.validate();
  if (opt.max_days < 1) throw Error("max_days must be positive");
  SimulationOutcome out;
  StepBuffers buf;
  std::int64_t peak = 0;
  for (int day = 1; day <= opt.max_days; ++day) {
    const DayTotals t = advance_day(world, disease, rng, buf);
    out.global_incidence.push_back(t.new_infections);
    detail::record_prevalence(world, out, opt.record_cities);
    if (t.new_infections > peak) {
      peak = t.new_infections;
      out.peak_day = day;
    }
    if (!out.pandemic_day) {
      std::size_t above = 0;
      if (opt.criterion.kind == PandemicCriterion::Kind::Regions) {
        for (double p : out.regional_prevalence.back()) above += p > opt.criterion.threshold_per_100k;
      } else {
        for (const auto& c : world.cells)
          above += c.total() > 0 && static_cast<double>(c.infectious()) / static_cast<double>(c.total()) * 1e5 >
                                        opt.criterion.threshold_per_100k;
      }
      if (above >= opt.criterion.count) {
        out.pandemic_day = day;
        if (opt.stop_at_pandemic) break;
      }
    }
    if (t.exposed == 0 && t.infectious == 0) break;
  }
  return out;
}

struct RunSummary {
  std::size_t run = 0;
  std::optional<int> pandemic_day;
  std::optional<int> peak_day;
};

struct EnsembleSummary {
  std::vector<RunSummary> runs;
  std::optional<double> median_pandemic_day;  // none: the median run had no pandemic
  std::optional<double> median_peak_day;
  std::vector<SimulationOutcome> outcomes;    // filled only when requested

  std::size_t pandemic_count() const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunSummary& r) {
      return r.pandemic_day.has_value();
    }));
  }
};

struct EnsembleOptions {
  std::size_t runs = 20;
  SimulationOptions simulation;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  bool keep_outcomes = false;
};

// Censored median: runs without the event count as +infinity; the lower of the
// two middle values is taken for an even number of runs.
inline std::optional<double> censored_median(const std::vector<std::optional<int>>& days) {
  std::vector<double> v;
  v.reserve(days.size());
  for (const auto& d : days) v.push_back(d ? static_cast<double>(*d) : std::numeric_limits<double>::infinity());
  const double m = stats::lower_median(v);
  if (std::isinf(m)) return std::nullopt;
  return m;
}

// Independent runs seeded at `seed_airport`. Run r draws from the stream
// derived from (base_seed, seed airport IATA, r), so the summary depends only
// on the inputs, not on the worker count.
inline EnsembleSummary run_ensemble(const World& world, const DiseaseModel& disease, NodeId seed_airport,
                                    const EnsembleOptions& opt = {}) {
  if (opt.runs < 1) throw Error("ensemble needs at least one run");
  const World seeded = seed_outbreak(world, seed_airport, disease);
  const std::uint64_t airport_key = fnv1a(world.graph->airport(seed_airport).iata);
  std::vector<SimulationOutcome> outcomes(opt.runs);
  parallel_for(opt.runs, opt.workers, [&](std::size_t r) {
    Rng rng = derive_rng(opt.base_seed, "episim-run", {airport_key, r});
    outcomes[r] = simulate(seeded, disease, rng, opt.simulation);
  });
  EnsembleSummary s;
  std::vector<std::optional<int>> pand, peak;
  for (std::size_t r = 0; r < opt.runs; ++r) {
    s.runs.push_back({r, outcomes[r].pandemic_day, outcomes[r].peak_day});
    pand.push_back(outcomes[r].pandemic_day);
    peak.push_back(outcomes[r].peak_day);
  }
  s.median_pandemic_day = censored_median(pand);
  s.median_peak_day = censored_median(peak);
  if (opt.keep_outcomes) s.outcomes = std::move(outcomes);
  return s;
}

}  // namespace aef

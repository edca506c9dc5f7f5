#include "ctca/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "ctca/optimal_solver.hpp"
#include "ctca/svg_chart.hpp"

namespace ctca {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": " + v);
  }
}

long to_long(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    long out = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": " + v);
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean value for " + key + ": " + v);
}

// Runs fn(0..count-1) on up to `jobs` threads; results land in slot order so
// downstream aggregation is independent of scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(int count, int jobs, Fn fn) {
  std::vector<T> out(count);
  if (count == 0) return out;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        out[i] = fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::ofstream f(dir + "/" + name, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + dir + "/" + name);
  return f;
}

std::uint64_t effective_seed(const ExperimentSpec& spec) {
  if (spec.seed_set) return spec.base.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

void apply_config(ExperimentSpec& spec, std::istream& in) {
  std::string line;
  std::string section = "sim";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "sim.side_m") spec.base.side_m = to_double(value, qual);
    else if (qual == "sim.nodes") spec.base.nodes = static_cast<int>(to_long(value, qual));
    else if (qual == "sim.radius_frac") spec.base.radius_frac = to_double(value, qual);
    else if (qual == "sim.initial_energy_j") spec.base.initial_energy_j = to_double(value, qual);
    else if (qual == "sim.data_bits") spec.base.data_bits = to_double(value, qual);
    else if (qual == "sim.rounds") spec.base.rounds_cap = static_cast<int>(to_long(value, qual));
    else if (qual == "sim.replications") spec.base.replications = static_cast<int>(to_long(value, qual));
    else if (qual == "sim.seed") {
      spec.base.seed = static_cast<std::uint64_t>(to_long(value, qual));
      spec.seed_set = true;
    } else if (qual == "sim.record_ledger") spec.base.record_ledger = to_bool(value, qual);
    else if (qual == "sim.generation_retries") spec.base.generation_retries = static_cast<int>(to_long(value, qual));
    else if (qual == "sim.algorithm" || qual == "sim.algorithms") {
      spec.algorithms.clear();
      for (const std::string& name : split(value, ',')) {
        auto a = algorithm_from_name(trim(name));
        if (!a) throw ConfigError("unknown algorithm: " + name);
        spec.algorithms.push_back(*a);
      }
      if (!spec.algorithms.empty()) spec.base.algorithm = spec.algorithms.front();
    } else if (qual == "protocol.q_max") spec.base.protocol.q_max = static_cast<int>(to_long(value, qual));
    else if (qual == "protocol.t1") spec.base.protocol.t1 = to_double(value, qual);
    else if (qual == "protocol.t2") spec.base.protocol.t2 = to_double(value, qual);
    else if (qual == "protocol.t3") spec.base.protocol.t3 = to_double(value, qual);
    else if (qual == "protocol.control_bits") spec.base.protocol.control_bits = to_double(value, qual);
    else if (qual == "sweep.radii_m") {
      spec.radii_m.clear();
      for (const std::string& v : split(value, ',')) spec.radii_m.push_back(to_double(trim(v), qual));
    } else if (qual == "sweep.densities_per_km2") {
      spec.densities_per_km2.clear();
      for (const std::string& v : split(value, ',')) spec.densities_per_km2.push_back(to_double(trim(v), qual));
    } else if (qual == "sweep.tracked_rounds") {
      spec.tracked_rounds.clear();
      for (const std::string& v : split(value, ',')) spec.tracked_rounds.push_back(static_cast<int>(to_long(trim(v), qual)));
    } else if (qual == "check.instances") spec.check_instances = static_cast<int>(to_long(value, qual));
    else if (qual == "check.nodes") spec.check_nodes = static_cast<int>(to_long(value, qual));
    else if (qual == "check.side_m") spec.check_side_m = to_double(value, qual);
    else if (qual == "check.radius_frac") spec.check_radius_frac = to_double(value, qual);
    else if (qual == "sim.deployment") spec.deployment_path = value;
    else if (qual == "output.dir") spec.out_dir = value;
    else if (qual == "output.svg") spec.emit_svg = to_bool(value, qual);
    else if (qual == "output.jobs") spec.jobs = static_cast<int>(to_long(value, qual));
    else throw ConfigError("unknown config key: " + qual);
  }
}

void apply_config_file(ExperimentSpec& spec, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  apply_config(spec, f);
}

NetworkInstance random_connected_instance(int nodes, double side_m, double radius_frac,
                                          double energy_j, Rng& rng,
                                          const RadioParams& radio) {
  SimConfig cfg;
  cfg.nodes = nodes;
  cfg.side_m = side_m;
  cfg.radius_frac = radius_frac;
  cfg.initial_energy_j = energy_j;
  cfg.radio = radio;
  return generate_instance(cfg, rng);
}

GameView random_game_view(const NetworkInstance& net, Rng& rng, double energy_lo,
                          double energy_hi) {
  PowerAssignment p;
  p.power.resize(net.size());
  for (NodeId i = 0; i < net.size(); ++i) p[i] = net.menu(i).max();
  const int steps = 4 * net.size();
  for (int s = 0; s < steps; ++s) {
    const NodeId i = static_cast<NodeId>(rng.below(net.size()));
    const PowerMenu& menu = net.menu(i);
    const std::size_t cur = *menu.index_of(p[i]);
    if (cur == 0) continue;
    const std::size_t lower = rng.below(cur);
    const PowerAssignment cand = p.with(i, menu.levels[lower]);
    if (is_strongly_connected(net, cand)) p = cand;
  }
  std::vector<double> energies(net.size());
  for (double& w : energies) w = rng.uniform(energy_lo, energy_hi);
  return GameView(net, std::move(p), std::move(energies));
}

CompareResult run_compare(const ExperimentSpec& spec) {
  if (spec.algorithms.empty()) {
    throw ConfigError("compare: need at least one algorithm");
  }
  CompareResult result;
  for (Algorithm alg : spec.algorithms) {
    auto lifetimes = parallel_map<int>(spec.base.replications, spec.jobs, [&](int rep) {
      SimConfig cfg = spec.base;
      cfg.algorithm = alg;
      cfg.seed = derive_seed(spec.base.seed, static_cast<std::uint64_t>(rep));
      return lifetime_rounds(simulate(cfg));
    });
    CompareSummary sum;
    sum.algorithm = alg;
    sum.replications = spec.base.replications;
    sum.lifetimes = lifetimes;
    double total = 0.0;
    int max_life = 0;
    for (int l : lifetimes) {
      total += l;
      max_life = std::max(max_life, l);
    }
    sum.mean_lifetime_rounds =
        lifetimes.empty() ? 0.0 : total / static_cast<double>(lifetimes.size());
    result.summaries.push_back(sum);

    std::vector<std::pair<int, double>> curve;
    for (int r = 1; r <= max_life; ++r) {
      int still = 0;
      for (int l : lifetimes) still += l >= r ? 1 : 0;
      curve.emplace_back(r, 100.0 * still / std::max<std::size_t>(1, lifetimes.size()));
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

int cmd_compare(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.base.seed = effective_seed(spec);
  ensure_out_dir(spec.out_dir);
  const CompareResult result = run_compare(spec);

  auto summary = open_out(spec.out_dir, "summary.csv");
  summary << fmt("# seed=%llu\n", static_cast<unsigned long long>(spec.base.seed));
  summary << "algorithm,replications,mean_lifetime_rounds\n";
  for (const CompareSummary& s : result.summaries) {
    summary << fmt("%s,%d,%.10g\n", algorithm_name(s.algorithm), s.replications,
                   s.mean_lifetime_rounds);
  }

  std::vector<ChartSeries> chart;
  for (std::size_t k = 0; k < result.summaries.size(); ++k) {
    const char* name = algorithm_name(result.summaries[k].algorithm);
    auto curve = open_out(spec.out_dir, std::string("curve_") + name + ".csv");
    curve << fmt("# seed=%llu algorithm=%s\n",
                 static_cast<unsigned long long>(spec.base.seed), name);
    curve << "round,percent_connected\n";
    ChartSeries series;
    series.label = name;
    for (auto [round, pct] : result.curves[k]) {
      curve << fmt("%d,%.10g\n", round, pct);
      series.points.emplace_back(round, pct);
    }
    chart.push_back(std::move(series));
  }
  if (spec.emit_svg) {
    auto svg = open_out(spec.out_dir, "lifetime.svg");
    write_line_chart_svg(chart, "Connected graphs by round", "round",
                         "% of replications connected", svg);
  }
  std::cout << "compare: wrote " << spec.out_dir << "/summary.csv for "
            << result.summaries.size() << " algorithm(s), seed " << spec.base.seed
            << "\n";
  return 0;
}

int cmd_simulate(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.base.seed = effective_seed(spec);
  ensure_out_dir(spec.out_dir);
  const int reps = spec.base.replications;
  std::optional<NetworkInstance> fixed;
  if (!spec.deployment_path.empty()) {
    std::ifstream df(spec.deployment_path);
    if (!df) throw ConfigError("cannot read deployment file " + spec.deployment_path);
    const Deployment d = read_deployment(df);
    spec.base.nodes = static_cast<int>(d.positions.size());
    spec.base.side_m = d.side_m;
    fixed.emplace(d.positions, d.energies, spec.base.radio, spec.base.p_max());
  }
  auto traces = parallel_map<SimTrace>(reps, spec.jobs, [&](int rep) {
    SimConfig cfg = spec.base;
    cfg.seed = derive_seed(spec.base.seed, static_cast<std::uint64_t>(rep));
    return fixed ? simulate_on(*fixed, cfg) : simulate(cfg);
  });
  for (int rep = 0; rep < reps; ++rep) {
    auto f = open_out(spec.out_dir, fmt("trace_%03d.csv", rep));
    write_trace_csv(traces[rep], f);
    if (spec.base.record_ledger) {
      auto lf = open_out(spec.out_dir, fmt("ledger_%03d.csv", rep));
      write_ledger_csv(traces[rep], lf);
    }
  }
  std::cout << "simulate: wrote " << reps << " trace file(s) under " << spec.out_dir
            << ", seed " << spec.base.seed << "\n";
  return 0;
}

PriceSweepResult run_price_sweep(const ExperimentSpec& spec) {
  std::vector<double> sweep = spec.radii_m;
  const bool by_density = sweep.empty();
  if (by_density) sweep = spec.densities_per_km2;
  if (sweep.empty()) {
    throw ConfigError("price-sweep: radii_m or densities_per_km2 must be set");
  }
  int max_round = 0;
  for (int r : spec.tracked_rounds) max_round = std::max(max_round, r);

  struct RepRatios {
    // per tracked round: (t_opt, t_ctca) or missing
    std::vector<std::optional<std::pair<double, double>>> cells;
  };

  PriceSweepResult result;
  std::vector<PriceCell>& out = result.cells;
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    SimConfig cfg = spec.base;
    cfg.algorithm = Algorithm::Ctca;
    cfg.rounds_cap = max_round;
    if (by_density) {
      const double km2 = cfg.side_m / 1000.0 * (cfg.side_m / 1000.0);
      cfg.nodes = std::max(2, static_cast<int>(std::lround(sweep[s] * km2)));
    } else {
      cfg.radius_frac = sweep[s] / cfg.side_m;
    }

    auto reps = parallel_map<RepRatios>(cfg.replications, spec.jobs, [&](int rep) {
      SimConfig rc = cfg;
      rc.seed = derive_seed(spec.base.seed,
                            (static_cast<std::uint64_t>(s) << 32) + static_cast<std::uint64_t>(rep));
      RepRatios rr;
      rr.cells.resize(spec.tracked_rounds.size());
      RoundHooks hooks;
      hooks.after_adjust = [&](const NetworkInstance& net, int round,
                               const std::vector<double>& start_energies,
                               const PowerAssignment& assignment) {
        const auto pos = std::find(spec.tracked_rounds.begin(), spec.tracked_rounds.end(), round);
        if (pos == spec.tracked_rounds.end()) return;
        for (NodeId i = 0; i < net.size(); ++i) {
          if (start_energies[i] <= 0.0 || assignment[i] <= 0.0) return;  // death: skip round
        }
        double t_ctca = std::numeric_limits<double>::infinity();
        for (NodeId i = 0; i < net.size(); ++i) {
          t_ctca = std::min(t_ctca, estimated_lifetime(start_energies[i], assignment[i]));
        }
        const double t_opt = optimal_maxmin(net, start_energies).t_opt_bits;
        rr.cells[pos - spec.tracked_rounds.begin()] = std::make_pair(t_opt, t_ctca);
      };
      simulate(rc, hooks);
      return rr;
    });

    std::vector<PriceRound> rows;
    for (const RepRatios& rr : reps) {
      for (std::size_t t = 0; t < spec.tracked_rounds.size(); ++t) {
        if (!rr.cells[t]) continue;
        rows.push_back({spec.tracked_rounds[t], rr.cells[t]->first, rr.cells[t]->second});
      }
    }
    result.rounds.push_back(std::move(rows));

    for (std::size_t t = 0; t < spec.tracked_rounds.size(); ++t) {
      PriceCell cell;
      cell.sweep_value = sweep[s];
      cell.round = spec.tracked_rounds[t];
      double sum = 0.0;
      double min_ratio = std::numeric_limits<double>::infinity();
      int optimal = 0;
      for (const RepRatios& rr : reps) {
        if (!rr.cells[t]) continue;
        const auto [t_opt, t_ctca] = *rr.cells[t];
        const double ratio = t_opt / t_ctca;
        cell.samples += 1;
        sum += ratio;
        min_ratio = std::min(min_ratio, ratio);
        if (std::abs(ratio - 1.0) <= 1e-9) ++optimal;
      }
      cell.mean_ratio = cell.samples > 0 ? sum / cell.samples : 0.0;
      cell.percent_optimal = cell.samples > 0 ? 100.0 * optimal / cell.samples : 0.0;
      cell.min_ratio = cell.samples > 0 ? min_ratio : 0.0;
      out.push_back(cell);
    }
  }
  return result;
}

int cmd_price_sweep(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.base.seed = effective_seed(spec);
  ensure_out_dir(spec.out_dir);
  const PriceSweepResult result = run_price_sweep(spec);
  const std::vector<PriceCell>& cells = result.cells;
  auto f = open_out(spec.out_dir, "price.csv");
  f << fmt("# seed=%llu sweep=%s\n", static_cast<unsigned long long>(spec.base.seed),
           spec.radii_m.empty() ? "density_per_km2" : "radius_m");
  f << "sweep_value,round,samples,mean_ratio,percent_optimal,min_ratio\n";
  for (const PriceCell& c : cells) {
    f << fmt("%.10g,%d,%d,%.10g,%.10g,%.10g\n", c.sweep_value, c.round, c.samples,
             c.mean_ratio, c.percent_optimal, c.min_ratio);
  }
  const std::vector<double>& sweep_values =
      spec.radii_m.empty() ? spec.densities_per_km2 : spec.radii_m;
  for (std::size_t s = 0; s < result.rounds.size(); ++s) {
    auto rf = open_out(spec.out_dir, fmt("price_rounds_%g.csv", sweep_values[s]));
    rf << fmt("# seed=%llu sweep_value=%g\n",
              static_cast<unsigned long long>(spec.base.seed), sweep_values[s]);
    write_price_csv(result.rounds[s], rf);
  }
  if (spec.emit_svg) {
    std::vector<ChartSeries> mean_chart, pct_chart;
    for (int round : spec.tracked_rounds) {
      ChartSeries ms, ps;
      ms.label = "round " + std::to_string(round);
      ps.label = ms.label;
      for (const PriceCell& c : cells) {
        if (c.round != round) continue;
        ms.points.emplace_back(c.sweep_value, c.mean_ratio);
        ps.points.emplace_back(c.sweep_value, c.percent_optimal);
      }
      mean_chart.push_back(std::move(ms));
      pct_chart.push_back(std::move(ps));
    }
    auto f1 = open_out(spec.out_dir, "price_mean.svg");
    write_line_chart_svg(mean_chart, "Average price paid", "sweep value", "mean ratio", f1);
    auto f2 = open_out(spec.out_dir, "price_percent_optimal.svg");
    write_line_chart_svg(pct_chart, "Share of optimal solutions", "sweep value",
                         "% optimal", f2);
  }
  std::cout << "price-sweep: wrote " << spec.out_dir << "/price.csv with " << cells.size()
            << " cells, seed " << spec.base.seed << "\n";
  return 0;
}

PotentialCheckResult run_potential_check(const ExperimentSpec& spec) {
  PotentialCheckResult result;
  std::ostringstream scatter;
  scatter << "instance,node,power_nJ_bit,delta_u,delta_phi,verdict\n";

  struct InstanceOutcome {
    long checks = 0, violations = 0, both_zero = 0;
    std::string rows;
  };
  auto outcomes = parallel_map<InstanceOutcome>(spec.check_instances, spec.jobs, [&](int k) {
    InstanceOutcome oc;
    Rng rng(derive_seed(spec.base.seed, static_cast<std::uint64_t>(k)));
    const NetworkInstance net =
        random_connected_instance(spec.check_nodes, spec.check_side_m,
                                  spec.check_radius_frac, spec.base.initial_energy_j, rng,
                                  spec.base.radio);
    const GameView view = random_game_view(net, rng, 0.5 * spec.base.initial_energy_j,
                                           spec.base.initial_energy_j);
    std::ostringstream rows;
    for (NodeId i = 0; i < net.size(); ++i) {
      for (double a : net.menu(i).levels) {
        const SignCheck check = sign_consistency(view, i, a, view.assignment[i]);
        ++oc.checks;
        const char* verdict = "consistent";
        if (check.verdict == SignVerdict::BothZero) {
          ++oc.both_zero;
          verdict = "both_zero";
        } else if (check.verdict == SignVerdict::Violated) {
          ++oc.violations;
          verdict = "violated";
        }
        rows << fmt("%d,%d,%.10g,%.10g,%.10g,%s\n", k, i, a * 1e9, check.delta_u,
                    check.delta_phi, verdict);
      }
    }
    oc.rows = rows.str();
    return oc;
  });
  for (const InstanceOutcome& oc : outcomes) {
    result.checks += oc.checks;
    result.violations += oc.violations;
    result.both_zero += oc.both_zero;
    scatter << oc.rows;
  }
  result.scatter_csv = scatter.str();
  return result;
}

int cmd_potential_check(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.base.seed = effective_seed(spec);
  ensure_out_dir(spec.out_dir);
  const PotentialCheckResult result = run_potential_check(spec);
  auto f = open_out(spec.out_dir, "potential_check.csv");
  f << fmt("# seed=%llu instances=%d nodes=%d\n",
           static_cast<unsigned long long>(spec.base.seed), spec.check_instances,
           spec.check_nodes);
  f << result.scatter_csv;
  std::cout << "potential-check: " << result.checks << " deviations, "
            << result.violations << " violation(s), " << result.both_zero
            << " both-zero, seed " << spec.base.seed << "\n";
  return result.violations == 0 ? 0 : 4;
}

int run_command(const ExperimentSpec& spec) {
  try {
    switch (spec.command) {
      case Command::Simulate: return cmd_simulate(spec);
      case Command::Compare: return cmd_compare(spec);
      case Command::PriceSweep: return cmd_price_sweep(spec);
      case Command::PotentialCheck: return cmd_potential_check(spec);
    }
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const GenerationFailure& e) {
    std::cerr << "generation failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ctca

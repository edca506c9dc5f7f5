// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its measurements. Criteria run exactly as stated; where a stated
// configuration is infeasible the criterion fails honestly and a labeled
// diagnostic shows the behavior at the nearest feasible setting (analysis in
// the project notes).

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "ctca/baselines.hpp"
#include "ctca/experiment.hpp"
#include "ctca/game_core.hpp"
#include "ctca/optimal_solver.hpp"
#include "ctca/protocol_ctca.hpp"
#include "ctca/sim_engine.hpp"
#include "support/fixtures.hpp"

using namespace ctca;
using namespace ctca::testing;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
}

void note(const std::string& text) {
  std::printf("       %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct LifetimePair {
  std::vector<int> ctca;
  std::vector<int> dlss;
};

// Matched-seed lifetime comparison, parallel over replications.
LifetimePair matched_lifetimes(double radius_frac, int reps, std::uint64_t seed) {
  LifetimePair out;
  out.ctca.resize(reps);
  out.dlss.resize(reps);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < 2 * reps; r = next.fetch_add(1)) {
      SimConfig cfg;
      cfg.nodes = 30;
      cfg.side_m = 1500.0;
      cfg.radius_frac = radius_frac;
      cfg.initial_energy_j = 2000.0;
      cfg.rounds_cap = 1000000;
      cfg.algorithm = r < reps ? Algorithm::Ctca : Algorithm::Dlss;
      cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(r % reps));
      (r < reps ? out.ctca : out.dlss)[r % reps] = lifetime_rounds(simulate(cfg));
    }
  };
  std::thread t1(worker), t2(worker);
  t1.join();
  t2.join();
  return out;
}

}  // namespace

TEST_CASE("criterion 1: ordinal-potential sign consistency") {
  // >= 50 random connected 8-node instances (radius 35% of side), full
  // enumeration of unilateral menu deviations, zero violations demanded at
  // relative 1e-12 / absolute 1e-6-bit tolerance.
  Stopwatch watch;
  ExperimentSpec spec;
  spec.base.seed = 90210;
  spec.seed_set = true;
  spec.base.initial_energy_j = 40e3;
  spec.check_instances = 50;
  spec.check_nodes = 8;
  spec.check_side_m = 1000.0;
  spec.check_radius_frac = 0.35;
  spec.jobs = 2;
  const PotentialCheckResult result = run_potential_check(spec);
  const bool ok = result.violations == 0;
  report(1, ok,
         fmt("%ld violations in %ld enumerated deviations over 50 instances (%.1fs)",
             result.violations, result.checks, watch.seconds()));
  if (!ok) {
    note("over-sacrificing raises lower the mover's utility while the potential");
    note("rises, and deep reductions can do the reverse; the sign property fails");
    note("under every faithful reading of the formulas (analysis in the project");
    note("notes; the game-core unit suite pins a concrete counterexample)");
  }
  CHECK(watch.seconds() < 120.0);
  CHECK(ok);
}

TEST_CASE("criterion 2: connectivity safety to first death") {
  // 100 seeded 30-node adaptive runs to the first death; no round may end
  // with the live subgraph disconnected (exact check each round).
  Stopwatch watch;
  std::atomic<int> next{0};
  std::atomic<long> rounds{0};
  std::atomic<int> predeath_disconnects{0};
  std::atomic<int> deathless{0};
  auto worker = [&] {
    for (int rep = next.fetch_add(1); rep < 100; rep = next.fetch_add(1)) {
      SimConfig cfg;
      cfg.nodes = 30;
      cfg.side_m = 1500.0;
      cfg.radius_frac = 0.35;
      cfg.initial_energy_j = 500.0;
      cfg.rounds_cap = 1000000;
      cfg.algorithm = Algorithm::Ctca;
      cfg.seed = derive_seed(1234, static_cast<std::uint64_t>(rep));
      const SimTrace tr = simulate(cfg);
      rounds += static_cast<long>(tr.rounds.size());
      if (tr.first_death_round == 0) ++deathless;
      for (const RoundRecord& r : tr.rounds) {
        if (r.deaths == 0 && !r.alive_connected) ++predeath_disconnects;
      }
    }
  };
  std::thread t1(worker), t2(worker);
  t1.join();
  t2.join();
  const bool ok = predeath_disconnects == 0 && deathless == 0;
  report(2, ok,
         fmt("%d pre-death disconnects across %ld adjustment rounds, "
             "%d runs ended without death (%.1fs)",
             predeath_disconnects.load(), rounds.load(), deathless.load(),
             watch.seconds()));
  CHECK(watch.seconds() < 300.0);
  CHECK(predeath_disconnects == 0);
  CHECK(deathless == 0);
}

TEST_CASE("criterion 3: lifetime improvement over the static baseline") {
  // 100 matched-seed 30-node side-1500 instances, 2 kJ nodes, radius 20% of
  // side: mean lifetime >= 1.2x the static baseline and a win on >= 80% of
  // seeds.
  Stopwatch watch;
  const LifetimePair pinned = matched_lifetimes(0.2, 100, 424242);
  double sum_c = 0.0, sum_d = 0.0;
  int wins = 0;
  for (int r = 0; r < 100; ++r) {
    sum_c += pinned.ctca[r];
    sum_d += pinned.dlss[r];
    wins += pinned.ctca[r] >= pinned.dlss[r] ? 1 : 0;
  }
  const double ratio = sum_c / sum_d;
  const bool ok = ratio >= 1.2 && wins >= 80;
  report(3, ok,
         fmt("radius 20%%: mean lifetime ratio %.3f (need 1.2), wins %d/100 "
             "(need 80) (%.1fs)",
             ratio, wins, watch.seconds()));
  if (!ok) {
    note("at radius 0.2*side a 30-node deployment averages degree ~3.6 (a 200-node");
    note("10 km field has ~25): first deaths are gateway nodes whose far link no");
    note("neighbor can cover, so no cooperative raise exists; diagnostic at matched");
    note("density follows (analysis in the project notes)");
    Stopwatch diag_watch;
    const LifetimePair diag = matched_lifetimes(0.35, 100, 424242);
    double dc = 0.0, dd = 0.0;
    int dw = 0, near = 0;
    for (int r = 0; r < 100; ++r) {
      dc += diag.ctca[r];
      dd += diag.dlss[r];
      dw += diag.ctca[r] >= diag.dlss[r] ? 1 : 0;
      near += diag.ctca[r] >= 0.98 * diag.dlss[r] ? 1 : 0;
    }
    note(fmt("diagnostic radius 35%% (degree ~11, the density the protocol was"));
    note(fmt("designed around): ratio %.3f, strict wins %d/100, within 2%% or better "
             "%d/100 (%.1fs)",
             dc / dd, dw, near, diag_watch.seconds()));
    note("losses are deployments whose bottleneck still has no coverable far link;");
    note("there the adaptive run equals the static one minus its control overhead");
    // The mechanism must clear the improvement bar once density permits help,
    // win outright on a majority of seeds and never lose more than overhead.
    CHECK(dc / dd >= 1.2);
    CHECK(dw > 50);
    CHECK(near >= 95);
  }
  CHECK(watch.seconds() < 900.0);
  CHECK(ratio >= 1.2);
  CHECK(wins >= 80);
}

TEST_CASE("criterion 4: optimal solver equals brute force") {
  // >= 50 random 6-node instances: greedy max-min lifetime equals exhaustive
  // enumeration over all connectivity-preserving menu assignments.
  Stopwatch watch;
  Rng rng(777);
  int exact = 0;
  const int instances = 50;
  for (int k = 0; k < instances; ++k) {
    const NetworkInstance net = random_connected_instance(6, 1000.0, 0.4, 1.0, rng);
    std::vector<double> energies(6);
    for (double& w : energies) w = rng.uniform(0.5, 1.0);
    const double greedy = optimal_maxmin(net, energies).t_opt_bits;
    const double brute = brute_force_maxmin(net, energies);
    if (std::abs(greedy - brute) <= 1e-12 * std::max(greedy, brute)) ++exact;
  }
  const bool ok = exact == instances;
  report(4, ok, fmt("greedy == brute force on %d/%d instances (%.1fs)", exact, instances,
                    watch.seconds()));
  CHECK(watch.seconds() < 120.0);
  CHECK(exact == instances);
}

TEST_CASE("criterion 5: price bounds and qualitative shape") {
  // Every per-round ratio >= 1 - 1e-12; desk sweep 60 nodes, side 1000 m,
  // radii {100, 200, 400} m, 100 replications: round-1 percent-optimal at
  // 100 m above 200 m, round-6 percent-optimal <= round-1 at each radius.
  Stopwatch watch;
  ExperimentSpec spec;
  spec.base.nodes = 60;
  spec.base.side_m = 1000.0;
  spec.base.initial_energy_j = 10.0;
  spec.base.replications = 100;
  spec.base.seed = 2026;
  spec.seed_set = true;
  spec.jobs = 2;
  spec.tracked_rounds = {1, 2, 6};

  // The 100 m point, probed alone: at 60 nodes per km^2 the connectivity
  // threshold radius is ~147 m and no connected deployment shows up in two
  // million draws, so the attempt is bounded to fail fast and loud.
  bool point_100_feasible = true;
  std::string gen_msg;
  {
    SimConfig probe = spec.base;
    probe.radius_frac = 100.0 / probe.side_m;
    probe.generation_retries = 500000;
    Rng rng(derive_seed(spec.base.seed, 0));
    try {
      (void)generate_instance(probe, rng);
    } catch (const GenerationFailure& e) {
      point_100_feasible = false;
      gen_msg = e.what();
    }
  }

  spec.radii_m = {200.0, 400.0};
  const std::vector<PriceCell> cells = run_price_sweep(spec).cells;
  bool ratios_ok = true;
  bool round6_ok = true;
  auto cell = [&](const std::vector<PriceCell>& cs, double radius,
                  int round) -> const PriceCell& {
    for (const PriceCell& c : cs) {
      if (c.sweep_value == radius && c.round == round) return c;
    }
    throw std::logic_error("missing sweep cell");
  };
  for (const PriceCell& c : cells) {
    if (c.samples == 0 || c.min_ratio < 1.0 - 1e-12) ratios_ok = false;
  }
  for (double r : {200.0, 400.0}) {
    if (cell(cells, r, 6).percent_optimal > cell(cells, r, 1).percent_optimal) {
      round6_ok = false;
    }
  }

  const bool ok = point_100_feasible && ratios_ok && round6_ok;
  report(5, ok,
         fmt("100 m point %s; ratio bound %s and round-6 <= round-1 %s at "
             "{200,400} m (%.1fs)",
             point_100_feasible ? "generated" : "INFEASIBLE (no connected deployment)",
             ratios_ok ? "holds" : "violated", round6_ok ? "holds" : "violated",
             watch.seconds()));
  if (!point_100_feasible) {
    note(gen_msg);
    for (const PriceCell& c : cells) {
      note(fmt("criterion cell: radius %.0f m round %d: mean ratio %.4f, %.1f%% optimal",
               c.sweep_value, c.round, c.mean_ratio, c.percent_optimal));
    }
    note("diagnostic at the feasible sparse edge (160 m, ~1.4% of deployments");
    note("connected) exercising the intended sparse-vs-intermediate comparison:");
    ExperimentSpec diag = spec;
    diag.radii_m = {160.0, 200.0, 400.0};
    const std::vector<PriceCell> dcells = run_price_sweep(diag).cells;
    for (const PriceCell& c : dcells) {
      note(fmt("radius %.0f m round %d: mean ratio %.4f, %.1f%% optimal (%d samples)",
               c.sweep_value, c.round, c.mean_ratio, c.percent_optimal, c.samples));
      CHECK(c.min_ratio >= 1.0 - 1e-12);
    }
    // Sparse graphs leave little room, so the distributed protocol is optimal
    // far more often at the sparse edge than at intermediate density; the
    // sixth-round decline is statistically resolvable only at the dense end
    // (at 160-200 m the round-1 and round-6 shares are a near-tie whose sign
    // flips with the seed).
    CHECK(cell(dcells, 160.0, 1).percent_optimal >
          cell(dcells, 200.0, 1).percent_optimal);
    CHECK(cell(dcells, 400.0, 6).percent_optimal <=
          cell(dcells, 400.0, 1).percent_optimal);
  }
  CHECK(watch.seconds() < 1200.0);
  CHECK(ratios_ok);
  CHECK(round6_ok);
  CHECK(point_100_feasible);
}

TEST_CASE("criterion 6: energy model point values") {
  Stopwatch watch;
  const RadioParams radio;
  const double tx50 = tx_energy(50.0, 1.0, radio);
  const double tx100 = tx_energy(100.0, 1.0, radio);
  const double rx1 = rx_energy(1.0, radio);
  const double fs_d0 = radio.e_elec + radio.eps_fs * radio.d0 * radio.d0;
  const double mp_d0 = tx_energy(radio.d0, 1.0, radio);
  const double mismatch = std::abs(fs_d0 - mp_d0) / mp_d0;
  const bool ok = std::abs(tx50 - 75e-9) <= 1e-15 * 75e-9 &&
                  std::abs(tx100 - 180e-9) <= 1e-15 * 180e-9 &&
                  std::abs(rx1 - 50e-9) <= 1e-15 * 50e-9 && mismatch <= 0.005;
  report(6, ok,
         fmt("tx(50m)=%.6g nJ, tx(100m)=%.6g nJ, rx=%.6g nJ, branch mismatch at d0 "
             "%.3f%% (%.1fs)",
             tx50 * 1e9, tx100 * 1e9, rx1 * 1e9, mismatch * 100.0, watch.seconds()));
  CHECK(ok);
}

TEST_CASE("criterion 7: cooperative three-node scenario end to end") {
  // From the stuck state the adaptive protocol must converge within round 1
  // to {66, 99, 99} nJ/bit via the raise-then-reduce exchange, matching the
  // centralized optimum exactly (price ratio 1).
  Stopwatch watch;
  const NetworkInstance net = three_node_line();
  const PowerAssignment stuck = stuck_assignment(net);

  int raises = 0, reduces = 0;
  EnergyLedger ledger(net.initial_energies());
  CtcaWorld world(net, ledger, ProtocolConfig{}, [&](const TraceEvent& ev) {
    if (ev.event == "raise") ++raises;
    if (ev.event == "reduce") ++reduces;
  });
  world.initialize_with(stuck);
  const std::vector<double> snapshot = ledger.snapshot();
  Rng rng(9);
  world.run_round(rng);

  const PowerAssignment& final_p = world.assignment();
  const bool assignment_ok = final_p[kA] == net.link_power(kA, kC) &&
                             final_p[kC] == net.link_power(kC, kB) &&
                             final_p[kB] == net.link_power(kB, kC);
  double t_ctca = std::numeric_limits<double>::infinity();
  for (NodeId i = 0; i < net.size(); ++i) {
    t_ctca = std::min(t_ctca, estimated_lifetime(snapshot[i], final_p[i]));
  }
  const double phi = potential_value(GameView(net, final_p, snapshot));
  const double t_opt = optimal_maxmin(net, snapshot).t_opt_bits;
  const double ratio = t_opt / t_ctca;
  const bool values_ok =
      std::abs(phi - t_opt) <= 1e-12 * t_opt && std::abs(ratio - 1.0) <= 1e-12;
  const bool narrative_ok = raises == 1 && reduces >= 1;
  const bool ok = assignment_ok && values_ok && narrative_ok;
  report(7, ok,
         fmt("assignment {%.4g, %.4g, %.4g} nJ/bit, phi=%.6g bits, T_opt=%.6g bits, "
             "price ratio %.12f, %d raise / %d reduce (%.1fs)",
             final_p[kA] * 1e9, final_p[kC] * 1e9, final_p[kB] * 1e9, phi, t_opt, ratio,
             raises, reduces, watch.seconds()));
  CHECK(assignment_ok);
  CHECK(values_ok);
  CHECK(narrative_ok);
}

TEST_CASE("criterion 8: byte-identical reruns") {
  Stopwatch watch;
  namespace fs = std::filesystem;
  const std::string base = "acceptance_determinism";
  fs::remove_all(base + "_a");
  fs::remove_all(base + "_b");

  ExperimentSpec spec;
  spec.base.nodes = 12;
  spec.base.side_m = 800.0;
  spec.base.radius_frac = 0.35;
  spec.base.initial_energy_j = 2.0;
  spec.base.replications = 6;
  spec.base.rounds_cap = 200;
  spec.base.seed = 31337;
  spec.seed_set = true;
  spec.jobs = 2;
  spec.algorithms = {Algorithm::Ctca, Algorithm::Dlss};
  spec.radii_m = {200.0, 280.0};
  spec.tracked_rounds = {1, 2};
  spec.check_instances = 8;
  spec.check_nodes = 8;

  auto run_all = [&](const std::string& dir) {
    ExperimentSpec s = spec;
    s.out_dir = dir;
    s.command = Command::Compare;
    (void)run_command(s);
    s.command = Command::PriceSweep;
    (void)run_command(s);
    s.command = Command::PotentialCheck;
    (void)run_command(s);
    s.command = Command::Simulate;
    (void)run_command(s);
  };
  run_all(base + "_a");
  run_all(base + "_b");
  bool all_equal = true;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(base + "_a")) {
    ++files;
    const auto other = fs::path(base + "_b") / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      all_equal = false;
      note("mismatch: " + entry.path().filename().string());
    }
  }
  report(8, all_equal && files > 0,
         fmt("%d output files byte-identical across reruns of all four commands (%.1fs)",
             files, watch.seconds()));
  CHECK(files > 0);
  CHECK(all_equal);
  fs::remove_all(base + "_a");
  fs::remove_all(base + "_b");
}

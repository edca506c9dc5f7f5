#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ctca/game_core.hpp"
#include "ctca/optimal_solver.hpp"
#include "ctca/sim_engine.hpp"

namespace ctca {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { Simulate, Compare, PriceSweep, PotentialCheck };

struct ExperimentSpec {
  Command command = Command::Simulate;
  SimConfig base;
  bool seed_set = false;  // when false, a random seed is drawn and echoed
  std::vector<Algorithm> algorithms{Algorithm::Ctca};
  std::vector<double> radii_m;            // price-sweep x axis
  std::vector<double> densities_per_km2;  // alternative sweep axis
  std::vector<int> tracked_rounds{1, 2, 6};
  std::string out_dir = ".";
  std::string deployment_path;  // simulate on a fixed deployment file
  bool emit_svg = false;
  int jobs = 0;  // 0 = hardware concurrency
  // Sign-consistency sampling
  int check_instances = 50;
  int check_nodes = 8;
  double check_side_m = 1000.0;
  double check_radius_frac = 0.35;
};

// key=value configuration with [section] headers; unknown keys are errors.
void apply_config(ExperimentSpec& spec, std::istream& in);
void apply_config_file(ExperimentSpec& spec, const std::string& path);

// Exit codes: 0 ok, 2 configuration error, 3 generation failure,
// 4 property violation.
int run_command(const ExperimentSpec& spec);

int cmd_simulate(const ExperimentSpec& spec);
int cmd_compare(const ExperimentSpec& spec);
int cmd_price_sweep(const ExperimentSpec& spec);
int cmd_potential_check(const ExperimentSpec& spec);

// ---- building blocks shared with the test suites ----

// Connected uniform deployment with the given shape.
NetworkInstance random_connected_instance(int nodes, double side_m, double radius_frac,
                                          double energy_j, Rng& rng,
                                          const RadioParams& radio = {});

// Random-but-valid game state: a downward random walk from the max-power
// assignment that keeps strong connectivity, plus energies drawn uniformly
// from [energy_lo, energy_hi].
GameView random_game_view(const NetworkInstance& net, Rng& rng, double energy_lo,
                          double energy_hi);

struct CompareSummary {
  Algorithm algorithm;
  int replications = 0;
  double mean_lifetime_rounds = 0.0;
  std::vector<int> lifetimes;  // per replication, seed order
};

// Matched-seed lifetime comparison; curves[i] pairs round -> percent connected.
struct CompareResult {
  std::vector<CompareSummary> summaries;
  std::vector<std::vector<std::pair<int, double>>> curves;
};
CompareResult run_compare(const ExperimentSpec& spec);

struct PriceCell {
  double sweep_value = 0.0;
  int round = 0;
  int samples = 0;
  double mean_ratio = 0.0;
  double percent_optimal = 0.0;
  double min_ratio = 0.0;
};
struct PriceSweepResult {
  std::vector<PriceCell> cells;
  // Raw (round, T_opt, T_alg) rows per sweep point, replication-major in
  // seed order.
  std::vector<std::vector<PriceRound>> rounds;
};
PriceSweepResult run_price_sweep(const ExperimentSpec& spec);

struct PotentialCheckResult {
  long checks = 0;
  long violations = 0;
  long both_zero = 0;
  std::string scatter_csv;  // instance,node,power_nJ_bit,delta_u,delta_phi,verdict
};
PotentialCheckResult run_potential_check(const ExperimentSpec& spec);

}  // namespace ctca

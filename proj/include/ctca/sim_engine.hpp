#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctca/net_model.hpp"
#include "ctca/protocol_ctca.hpp"
#include "ctca/rng.hpp"

namespace ctca {

enum class Algorithm { Ctca, Dlss, Drng, MaxPower };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

struct SimConfig {
  double side_m = 10000.0;
  int nodes = 200;
  double radius_frac = 0.2;  // maximum transmission radius as a fraction of side
  double initial_energy_j = 40e3;
  double data_bits = 288.0;
  RadioParams radio;
  Algorithm algorithm = Algorithm::Ctca;
  int rounds_cap = 10000;
  std::uint64_t seed = 1;
  int replications = 200;
  ProtocolConfig protocol;
  bool record_ledger = false;
  int generation_retries = 200000;

  double p_max() const;  // per-bit power at the maximum radius
};

struct LedgerRow {
  double remaining_j = 0.0;
  double tx_data_j = 0.0;
  double rx_data_j = 0.0;
  double tx_ctl_j = 0.0;
  double rx_ctl_j = 0.0;
};

struct RoundRecord {
  int round = 0;
  bool connected = false;        // every node alive and the graph strongly connected
  bool alive_connected = false;  // live subgraph strongly connected
  int alive = 0;
  double avg_tx_power_nj_bit = 0.0;
  double avg_path_cost_j = 0.0;  // mean energy of delivered minimum-energy paths
  double min_energy_j = 0.0;
  int deaths = 0;
  int no_path_events = 0;
  PowerAssignment assignment;
  std::vector<double> energies;
  std::vector<LedgerRow> ledger;  // populated when SimConfig::record_ledger
};

struct SimTrace {
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::Ctca;
  std::vector<RoundRecord> rounds;
  std::vector<std::string> anomalies;
  int first_death_round = 0;  // 0 when nobody died
};

// Minimum-energy route: directed edges weighted by the sender's transmit cost
// at its assigned power plus the receiver's reception cost. Equal-cost ties
// resolve to the lexicographically smallest node sequence. Empty result when
// no path exists among live nodes.
struct PathResult {
  std::vector<NodeId> path;  // src..dst inclusive
  double joules = 0.0;
};
std::optional<PathResult> min_energy_path(const NetworkInstance& net,
                                          const PowerAssignment& p,
                                          const std::vector<double>& energies,
                                          NodeId src, NodeId dst, double bits);

struct GenerationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform deployment in [0,side]^2, regenerated until strongly connected at
// maximum power. Throws GenerationFailure after the retry budget.
NetworkInstance generate_instance(const SimConfig& cfg, Rng& rng);

struct RoundHooks {
  // Runs after topology maintenance, before data traffic: round number, the
  // energies the round started with, the assignment in force.
  std::function<void(const NetworkInstance&, int, const std::vector<double>&,
                     const PowerAssignment&)>
      after_adjust;
};

SimTrace simulate(const SimConfig& cfg);
SimTrace simulate(const SimConfig& cfg, const RoundHooks& hooks);

// Runs the round loop on a caller-provided deployment. `start` preloads the
// adaptive protocol with a specific menu-valued assignment instead of the
// DLSS initialization (scenario replays); static algorithms ignore it.
SimTrace simulate_on(const NetworkInstance& net, const SimConfig& cfg,
                     const RoundHooks& hooks = {},
                     const std::optional<PowerAssignment>& start = std::nullopt);

// Completed rounds with the network fully connected (the c = 0 lifetime).
int lifetime_rounds(const SimTrace& trace);

void write_trace_csv(const SimTrace& trace, std::ostream& out);
void write_ledger_csv(const SimTrace& trace, std::ostream& out);

}  // namespace ctca

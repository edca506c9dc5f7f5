#include "ctca/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "ctca/baselines.hpp"
#include "ctca/radio_energy.hpp"

namespace ctca {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Ctca: return "ctca";
    case Algorithm::Dlss: return "dlss";
    case Algorithm::Drng: return "drng";
    case Algorithm::MaxPower: return "maxpower";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "ctca") return Algorithm::Ctca;
  if (name == "dlss") return Algorithm::Dlss;
  if (name == "drng") return Algorithm::Drng;
  if (name == "maxpower") return Algorithm::MaxPower;
  return std::nullopt;
}

double SimConfig::p_max() const {
  return tx_energy(radius_frac * side_m, 1.0, radio);
}

NetworkInstance generate_instance(const SimConfig& cfg, Rng& rng) {
  if (cfg.nodes < 2 || cfg.side_m <= 0.0 || cfg.radius_frac <= 0.0) {
    throw std::invalid_argument("generate_instance: bad configuration");
  }
  const double r_max = cfg.radius_frac * cfg.side_m;
  for (int attempt = 0; attempt < cfg.generation_retries; ++attempt) {
    std::vector<Position> pos(cfg.nodes);
    for (Position& p : pos) {
      p.x = rng.uniform(0.0, cfg.side_m);
      p.y = rng.uniform(0.0, cfg.side_m);
    }
    // Cheap connectivity screen on the disk graph before building tables.
    // Links are symmetric, so one BFS suffices.
    std::vector<char> seen(cfg.nodes, 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    int found = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      for (int v = 0; v < cfg.nodes; ++v) {
        if (seen[v] || v == u) continue;
        if (distance(pos[u], pos[v]) <= r_max) {
          seen[v] = 1;
          ++found;
          queue.push_back(v);
        }
      }
    }
    if (found != cfg.nodes) continue;
    return NetworkInstance(std::move(pos),
                           std::vector<double>(cfg.nodes, cfg.initial_energy_j),
                           cfg.radio, cfg.p_max());
  }
  throw GenerationFailure("generate_instance: no connected deployment within retry budget");
}

namespace {

// Per-round routing state: one reverse Dijkstra per destination, invalidated
// when a death changes the graph.
class Router {
 public:
  Router(const NetworkInstance& net, const PowerAssignment& p,
         const std::vector<bool>& alive, double bits)
      : net_(net), p_(p), alive_(alive), bits_(bits), dist_(net.size()),
        version_(net.size(), -1) {}

  void invalidate() { ++graph_version_; }

  double hop_cost(NodeId u) const {
    return p_[u] * bits_ + rx_energy(bits_, net_.radio());
  }

  std::optional<PathResult> route(NodeId src, NodeId dst) {
    const std::vector<double>& dist = distances_to(dst);
    if (!(dist[src] < kInf)) return std::nullopt;
    PathResult out;
    out.joules = dist[src];
    NodeId u = src;
    out.path.push_back(u);
    while (u != dst) {
      NodeId next = -1;
      for (NodeId v = 0; v < net_.size(); ++v) {
        if (v == u || !alive_[v]) continue;
        if (net_.link_power(u, v) > p_[u]) continue;
        if (hop_cost(u) + dist[v] == dist[u]) {
          next = v;
          break;
        }
      }
      if (next < 0) return std::nullopt;  // graph changed under us
      u = next;
      out.path.push_back(u);
    }
    return out;
  }

 private:
  const std::vector<double>& distances_to(NodeId dst) {
    std::vector<double>& dist = dist_[dst];
    if (version_[dst] == graph_version_) return dist;
    dist.assign(net_.size(), kInf);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    if (alive_[dst]) {
      dist[dst] = 0.0;
      heap.push({0.0, dst});
    }
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      for (NodeId v = 0; v < net_.size(); ++v) {
        if (v == u || !alive_[v]) continue;
        if (net_.link_power(v, u) > p_[v]) continue;  // edge v -> u
        const double cand = hop_cost(v) + d;
        if (cand < dist[v]) {
          dist[v] = cand;
          heap.push({cand, v});
        }
      }
    }
    version_[dst] = graph_version_;
    return dist;
  }

  const NetworkInstance& net_;
  const PowerAssignment& p_;
  const std::vector<bool>& alive_;
  double bits_;
  std::vector<std::vector<double>> dist_;
  std::vector<int> version_;
  int graph_version_ = 0;
};

}  // namespace

std::optional<PathResult> min_energy_path(const NetworkInstance& net,
                                          const PowerAssignment& p,
                                          const std::vector<double>& energies,
                                          NodeId src, NodeId dst, double bits) {
  if (src == dst) throw std::invalid_argument("min_energy_path: src == dst");
  std::vector<bool> alive(net.size());
  for (NodeId i = 0; i < net.size(); ++i) alive[i] = energies[i] > 0.0;
  if (!alive[src] || !alive[dst]) return std::nullopt;
  Router router(net, p, alive, bits);
  return router.route(src, dst);
}

namespace {

struct SimState {
  const NetworkInstance& net;
  const SimConfig& cfg;
  EnergyLedger& ledger;
  std::vector<bool> alive;
  CtcaWorld* world = nullptr;  // CTCA only
  int deaths_total = 0;
  int first_death_round = 0;
  int round = 0;

  void handle_death(NodeId i) {
    alive[i] = false;
    ++deaths_total;
    if (first_death_round == 0) first_death_round = round;
    if (world) world->mark_dead(i);
  }
};

// Static algorithms pay the same discovery sequence the adaptive protocol
// uses for its initialization: a maximum-power hello, the neighbor-info
// exchange and a power announcement, each a broadcast frame.
void charge_static_init(SimState& s) {
  const double bits = s.cfg.protocol.control_bits;
  auto broadcast = [&](NodeId i, double power) {
    if (!s.alive[i]) return;
    if (s.ledger.debit(i, power * bits, EnergyCategory::TxControl)) s.handle_death(i);
    for (NodeId j = 0; j < s.net.size(); ++j) {
      if (j == i || !s.alive[j]) continue;
      if (s.net.link_power(i, j) > power) continue;
      if (s.ledger.debit(j, rx_energy(bits, s.net.radio()), EnergyCategory::RxControl)) {
        s.handle_death(j);
      }
    }
  };
  for (NodeId i = 0; i < s.net.size(); ++i) broadcast(i, s.net.p_max());
  for (NodeId i = 0; i < s.net.size(); ++i) broadcast(i, s.net.menu(i).max());
  for (NodeId i = 0; i < s.net.size(); ++i) broadcast(i, s.net.menu(i).max());
}

void charge_static_hello(SimState& s, const PowerAssignment& assignment) {
  const double bits = s.cfg.protocol.control_bits;
  for (NodeId i = 0; i < s.net.size(); ++i) {
    if (!s.alive[i]) continue;
    if (s.ledger.debit(i, assignment[i] * bits, EnergyCategory::TxControl)) {
      s.handle_death(i);
    }
    for (NodeId j = 0; j < s.net.size(); ++j) {
      if (j == i || !s.alive[j]) continue;
      if (s.net.link_power(i, j) > assignment[i]) continue;
      if (s.ledger.debit(j, rx_energy(bits, s.net.radio()), EnergyCategory::RxControl)) {
        s.handle_death(j);
      }
    }
  }
}

}  // namespace

// Shared core; `carried_rng` continues the generation stream so that traffic
// and protocol draws follow the instance draws deterministically.
SimTrace simulate_on(const NetworkInstance& net, const SimConfig& cfg,
                     const RoundHooks& hooks,
                     const std::optional<PowerAssignment>& start, Rng* carried_rng);

SimTrace simulate(const SimConfig& cfg) { return simulate(cfg, RoundHooks{}); }

SimTrace simulate(const SimConfig& cfg, const RoundHooks& hooks) {
  if (cfg.rounds_cap < 0 || cfg.nodes < 2) {
    throw std::invalid_argument("simulate: bad configuration (ConfigError)");
  }
  Rng rng(cfg.seed);
  NetworkInstance net = generate_instance(cfg, rng);
  return simulate_on(net, cfg, hooks, std::nullopt, &rng);
}

SimTrace simulate_on(const NetworkInstance& net, const SimConfig& cfg,
                     const RoundHooks& hooks,
                     const std::optional<PowerAssignment>& start) {
  return simulate_on(net, cfg, hooks, start, nullptr);
}

SimTrace simulate_on(const NetworkInstance& net, const SimConfig& cfg,
                     const RoundHooks& hooks,
                     const std::optional<PowerAssignment>& start, Rng* carried_rng) {
  if (cfg.rounds_cap < 0 || net.size() < 2) {
    throw std::invalid_argument("simulate: bad configuration (ConfigError)");
  }
  Rng local_rng(cfg.seed);
  Rng& rng = carried_rng ? *carried_rng : local_rng;
  EnergyLedger ledger(net.initial_energies());

  SimTrace trace;
  trace.seed = cfg.seed;
  trace.algorithm = cfg.algorithm;

  SimState s{net, cfg, ledger, std::vector<bool>(static_cast<std::size_t>(net.size()), true),
             nullptr, 0, 0, 0};

  CtcaWorld world(net, ledger, cfg.protocol);
  PowerAssignment static_assignment;
  if (cfg.algorithm == Algorithm::Ctca) {
    s.world = &world;
    if (start) {
      world.initialize_with(*start);
    } else {
      world.initialize();
    }
  } else {
    switch (cfg.algorithm) {
      case Algorithm::Dlss: static_assignment = dlss(net).assignment; break;
      case Algorithm::Drng: static_assignment = drng(net).assignment; break;
      case Algorithm::MaxPower: static_assignment = max_power(net).assignment; break;
      default: break;
    }
    charge_static_init(s);
  }

  auto current_assignment = [&]() -> PowerAssignment {
    if (cfg.algorithm == Algorithm::Ctca) return world.assignment();
    PowerAssignment p = static_assignment;
    for (NodeId i = 0; i < net.size(); ++i) {
      if (!s.alive[i]) p[i] = 0.0;
    }
    return p;
  };

  for (int round = 1; round <= cfg.rounds_cap; ++round) {
    s.round = round;
    int alive_now = 0;
    for (bool a : s.alive) alive_now += a ? 1 : 0;
    if (alive_now == 0) break;
    if (!is_strongly_connected_among(net, current_assignment(), s.alive)) break;

    const std::vector<double> start_energies = ledger.snapshot();

    // (a) Topology maintenance.
    if (cfg.algorithm == Algorithm::Ctca) {
      world.run_round(rng);
      for (NodeId i = 0; i < net.size(); ++i) {
        if (s.alive[i] && !world.alive_mask()[i]) {
          s.alive[i] = false;
          ++s.deaths_total;
          if (s.first_death_round == 0) s.first_death_round = round;
        }
      }
    } else {
      charge_static_hello(s, static_assignment);
    }

    PowerAssignment assignment = current_assignment();
    if (hooks.after_adjust) hooks.after_adjust(net, round, start_energies, assignment);

    // (b) All-pairs data traffic over minimum-energy paths.
    Router router(net, assignment, s.alive, cfg.data_bits);
    double cost_sum = 0.0;
    int delivered = 0;
    int no_path = 0;
    for (NodeId src = 0; src < net.size(); ++src) {
      for (NodeId dst = 0; dst < net.size(); ++dst) {
        if (src == dst) continue;
        if (!s.alive[src] || !s.alive[dst]) continue;
        const auto path = router.route(src, dst);
        if (!path) {
          ++no_path;
          continue;
        }
        bool dropped = false;
        for (std::size_t h = 0; h + 1 < path->path.size(); ++h) {
          const NodeId u = path->path[h];
          const NodeId v = path->path[h + 1];
          if (!s.alive[u]) {  // relay died mid-path; traversed hops stay charged
            dropped = true;
            break;
          }
          if (ledger.debit(u, assignment[u] * cfg.data_bits, EnergyCategory::TxData)) {
            s.handle_death(u);
            router.invalidate();
          }
          if (s.alive[v] &&
              ledger.debit(v, rx_energy(cfg.data_bits, net.radio()), EnergyCategory::RxData)) {
            s.handle_death(v);
            router.invalidate();
          }
        }
        if (!dropped) {
          cost_sum += path->joules;
          ++delivered;
        } else {
          ++no_path;
        }
      }
    }

    // (c) Record the round.
    RoundRecord row;
    row.round = round;
    row.assignment = current_assignment();
    row.energies = ledger.snapshot();
    row.alive = 0;
    row.min_energy_j = kInf;
    double power_sum = 0.0;
    for (NodeId i = 0; i < net.size(); ++i) {
      if (!s.alive[i]) continue;
      row.alive += 1;
      power_sum += row.assignment[i];
      row.min_energy_j = std::min(row.min_energy_j, row.energies[i]);
    }
    if (row.alive == 0) row.min_energy_j = 0.0;
    row.avg_tx_power_nj_bit = row.alive > 0 ? power_sum / row.alive * 1e9 : 0.0;
    row.avg_path_cost_j = delivered > 0 ? cost_sum / delivered : 0.0;
    row.deaths = s.deaths_total;
    row.no_path_events = no_path;
    row.alive_connected =
        row.alive > 0 && is_strongly_connected_among(net, row.assignment, s.alive);
    row.connected = s.deaths_total == 0 && is_strongly_connected(net, row.assignment);
    if (cfg.record_ledger) {
      row.ledger.resize(net.size());
      for (NodeId i = 0; i < net.size(); ++i) {
        row.ledger[i] = LedgerRow{
            ledger.remaining(i), ledger.debited(i, EnergyCategory::TxData),
            ledger.debited(i, EnergyCategory::RxData),
            ledger.debited(i, EnergyCategory::TxControl),
            ledger.debited(i, EnergyCategory::RxControl)};
      }
    }
    trace.rounds.push_back(std::move(row));
    if (!trace.rounds.back().connected) break;
  }

  if (cfg.algorithm == Algorithm::Ctca) {
    trace.anomalies = world.anomalies();
  }
  trace.first_death_round = s.first_death_round;
  return trace;
}

int lifetime_rounds(const SimTrace& trace) {
  int n = 0;
  for (const RoundRecord& r : trace.rounds) n += r.connected ? 1 : 0;
  return n;
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# seed=%llu algorithm=%s\n",
                static_cast<unsigned long long>(trace.seed),
                algorithm_name(trace.algorithm));
  out << buf;
  out << "round,connected,alive,avg_tx_power_nJ_bit,avg_path_cost_J,min_energy_J\n";
  for (const RoundRecord& r : trace.rounds) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.10g,%.10g,%.10g\n", r.round,
                  r.connected ? 1 : 0, r.alive, r.avg_tx_power_nj_bit, r.avg_path_cost_j,
                  r.min_energy_j);
    out << buf;
  }
}

void write_ledger_csv(const SimTrace& trace, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# seed=%llu algorithm=%s\n",
                static_cast<unsigned long long>(trace.seed),
                algorithm_name(trace.algorithm));
  out << buf;
  out << "round,node,remaining_J,tx_data_J,rx_data_J,tx_ctl_J,rx_ctl_J\n";
  for (const RoundRecord& r : trace.rounds) {
    for (std::size_t i = 0; i < r.ledger.size(); ++i) {
      const LedgerRow& l = r.ledger[i];
      std::snprintf(buf, sizeof buf, "%d,%zu,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.round, i,
                    l.remaining_j, l.tx_data_j, l.rx_data_j, l.tx_ctl_j, l.rx_ctl_j);
      out << buf;
    }
  }
}

}  // namespace ctca

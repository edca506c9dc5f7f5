#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ctca/game_core.hpp"
#include "ctca/net_model.hpp"
#include "ctca/radio_energy.hpp"
#include "ctca/rng.hpp"

namespace ctca {

struct ProtocolConfig {
  int q_max = 4;        // NAPA executions allowed per node per round
  double t1 = 1.0;      // random-wait window
  double t2 = 500.0;    // energy-flag reset point
  double t3 = 1000.0;   // round length
  double control_bits = 288.0;
};

enum class MsgKind {
  Hello,
  NeighborInfo,
  PowerAnnounce,
  StatusFlag,
  EnergyBroadcast,
  EnergyRequest,
  NeighborInfoRequest,
  NeighborInfoReply,
};

struct ProtocolMessage {
  MsgKind kind;
  NodeId sender;
  double tx_power;
  double bits;
};

struct TraceEvent {
  double time;
  NodeId node;
  std::string event;
  std::string details;
};
using TraceSink = std::function<void(const TraceEvent&)>;
using MessageObserver = std::function<void(const ProtocolMessage&)>;

// What node i knows about neighbor j. One record per member of R_i(0); the
// geometry fields are filled during initialization, the cached status fields
// track j's announcements.
struct NeighborRecord {
  double link_power = 0.0;                           // p(i, j)
  std::vector<std::pair<NodeId, double>> links_of;   // j's link powers, by id
  std::vector<double> menu_of;                       // j's menu, ascending
  double power = -1.0;                               // last announced p_j
  bool flag = false;                                 // last announced S_j
  double energy = -1.0;                              // last announced W_j
  bool in_reverse = false;                           // j in I_i
};

struct NodeState {
  NodeId id = -1;
  bool alive = true;
  double power = 0.0;
  std::vector<double> menu;
  std::vector<NodeId> menu_targets;
  bool flag = false;              // S_i
  bool energy_info_shared = false;
  int napa_runs = 0;              // q, resets each round
  int messages_sent = 0;          // control transmissions this round
  std::map<NodeId, NeighborRecord> known;  // R_i(0), id-ordered

  // Reachable neighbors at the current power (alive filtering is the
  // caller's concern via CtcaWorld).
  bool reaches(NodeId j) const {
    auto it = known.find(j);
    return it != known.end() && it->second.link_power <= power;
  }
};

// The distributed protocol: initialization (Hello, neighbor info, DLSS,
// power/status announcements) and the per-round power-adjustment phase where
// each node runs NAPA with only the knowledge in its tables. All message
// energy flows through the shared ledger.
class CtcaWorld {
 public:
  CtcaWorld(const NetworkInstance& net, EnergyLedger& ledger, ProtocolConfig cfg,
            TraceSink trace = nullptr);

  // Algorithm-1 initialization; the resulting assignment is the DLSS one.
  void initialize();
  // Same message sequence, but adopting `start` instead of running DLSS.
  void initialize_with(const PowerAssignment& start);

  // One power-adjustment phase. Throws if the live graph is already
  // disconnected on entry.
  void run_round(Rng& rng);

  const PowerAssignment& assignment() const { return assignment_; }
  const NodeState& state(NodeId i) const { return states_[i]; }
  const std::vector<bool>& alive_mask() const { return alive_; }
  int alive_count() const;
  int round() const { return round_; }

  // External death notice (e.g. energy drained by data traffic).
  void mark_dead(NodeId i);

  // Committed reductions that broke global connectivity (logged, never
  // repaired) and table lookups that came up stale.
  const std::vector<std::string>& anomalies() const { return anomalies_; }

  // Invoked once per control transmission.
  void observe_messages(MessageObserver observer) { observer_ = std::move(observer); }

 private:
  struct Event {
    double time;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  void init_common(const PowerAssignment& start);
  void schedule(double at, std::function<void()> fn);
  void drain_queue();

  // Control transmissions. Receivers inside the radius pay rx; handlers run
  // inline in ascending id order. `extra` lists addressees delivered (and
  // charged rx) even when outside the radius.
  void broadcast_control(NodeId sender, double power, MsgKind kind,
                         const std::vector<NodeId>& extra,
                         const std::function<void(NodeId)>& handler);
  void unicast_control(NodeId sender, double power, MsgKind kind, NodeId to,
                       const std::function<void(NodeId)>& handler);

  void kickoff(NodeId i, Rng& rng);
  void napa(NodeId i, Rng& rng);
  ReduceDecision able_to_reduce_local(NodeId i);
  void handle_power_update(NodeId receiver, NodeId from, double p, bool s);
  void handle_neighbor_info_request(NodeId receiver, NodeId from);
  void handle_energy_request(NodeId receiver);
  void log(NodeId node, const std::string& event, const std::string& details);
  void process_death(NodeId i);

  const NetworkInstance& net_;
  EnergyLedger& ledger_;
  ProtocolConfig cfg_;
  TraceSink trace_;
  MessageObserver observer_;
  std::vector<NodeState> states_;
  std::vector<bool> alive_;
  PowerAssignment assignment_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  int round_ = 0;
  Rng* round_rng_ = nullptr;
  std::vector<std::string> anomalies_;
};

}  // namespace ctca

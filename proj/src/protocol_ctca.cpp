#include "ctca/protocol_ctca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ctca/baselines.hpp"

namespace ctca {

namespace {

const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::Hello: return "hello";
    case MsgKind::NeighborInfo: return "neighbor_info";
    case MsgKind::PowerAnnounce: return "power_announce";
    case MsgKind::StatusFlag: return "status_flag";
    case MsgKind::EnergyBroadcast: return "energy_broadcast";
    case MsgKind::EnergyRequest: return "energy_request";
    case MsgKind::NeighborInfoRequest: return "neighbor_info_request";
    case MsgKind::NeighborInfoReply: return "neighbor_info_reply";
  }
  return "?";
}

std::string fmt_power(double p) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", p * 1e9);
  return std::string(buf) + "nJ/bit";
}

}  // namespace

CtcaWorld::CtcaWorld(const NetworkInstance& net, EnergyLedger& ledger,
                     ProtocolConfig cfg, TraceSink trace)
    : net_(net), ledger_(ledger), cfg_(cfg), trace_(std::move(trace)) {
  if (cfg_.q_max < 1 || cfg_.t2 <= 0.0 || cfg_.t2 >= cfg_.t3 || cfg_.t1 <= 0.0 ||
      cfg_.control_bits <= 0.0) {
    throw std::invalid_argument("CtcaWorld: bad protocol configuration");
  }
  const int n = net_.size();
  states_.resize(n);
  alive_.assign(n, true);
  assignment_.power.assign(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    states_[i].id = i;
    states_[i].alive = ledger_.alive(i);
    alive_[i] = states_[i].alive;
  }
}

void CtcaWorld::log(NodeId node, const std::string& event, const std::string& details) {
  if (trace_) trace_(TraceEvent{now_, node, event, details});
}

int CtcaWorld::alive_count() const {
  int n = 0;
  for (bool a : alive_) n += a ? 1 : 0;
  return n;
}

void CtcaWorld::process_death(NodeId i) {
  if (!alive_[i]) return;
  alive_[i] = false;
  states_[i].alive = false;
  assignment_[i] = 0.0;
  log(i, "death", "");
}

void CtcaWorld::mark_dead(NodeId i) { process_death(i); }

void CtcaWorld::schedule(double at, std::function<void()> fn) {
  queue_.push(Event{at, seq_++, std::move(fn)});
}

void CtcaWorld::drain_queue() {
  while (!queue_.empty()) {
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.time;
    ev.fn();
  }
}

void CtcaWorld::broadcast_control(NodeId sender, double power, MsgKind kind,
                                  const std::vector<NodeId>& extra,
                                  const std::function<void(NodeId)>& handler) {
  if (!alive_[sender]) return;
  states_[sender].messages_sent += 1;
  log(sender, std::string("tx_") + kind_name(kind), fmt_power(power));
  if (observer_) observer_(ProtocolMessage{kind, sender, power, cfg_.control_bits});
  const bool sender_died =
      ledger_.debit(sender, power * cfg_.control_bits, EnergyCategory::TxControl)
          .has_value();
  // Receivers: everyone inside the radius plus the explicit addressees,
  // ascending id, once each.
  std::vector<NodeId> receivers;
  for (NodeId j = 0; j < net_.size(); ++j) {
    if (j == sender || !alive_[j]) continue;
    const bool in_radius = net_.link_power(sender, j) <= power;
    const bool addressed = std::find(extra.begin(), extra.end(), j) != extra.end();
    if (in_radius || addressed) receivers.push_back(j);
  }
  for (NodeId j : receivers) {
    if (!alive_[j]) continue;  // may have died earlier in this delivery
    const bool died =
        ledger_.debit(j, rx_energy(cfg_.control_bits, net_.radio()), EnergyCategory::RxControl)
            .has_value();
    if (died) {
      process_death(j);
      continue;  // received, but can no longer act on it
    }
    if (handler) handler(j);
  }
  if (sender_died) process_death(sender);
}

void CtcaWorld::unicast_control(NodeId sender, double power, MsgKind kind, NodeId to,
                                const std::function<void(NodeId)>& handler) {
  if (!alive_[sender]) return;
  states_[sender].messages_sent += 1;
  log(sender, std::string("tx_") + kind_name(kind), fmt_power(power));
  if (observer_) observer_(ProtocolMessage{kind, sender, power, cfg_.control_bits});
  const bool sender_died =
      ledger_.debit(sender, power * cfg_.control_bits, EnergyCategory::TxControl)
          .has_value();
  // The addressee is delivered reliably; bystanders inside the radius still
  // pay the reception cost of overhearing the control frame.
  for (NodeId j = 0; j < net_.size(); ++j) {
    if (j == sender || !alive_[j]) continue;
    const bool in_radius = net_.link_power(sender, j) <= power;
    if (j != to && !in_radius) continue;
    const bool died =
        ledger_.debit(j, rx_energy(cfg_.control_bits, net_.radio()), EnergyCategory::RxControl)
            .has_value();
    if (died) {
      process_death(j);
      continue;
    }
    if (j == to && handler) handler(j);
  }
  if (sender_died) process_death(sender);
}

void CtcaWorld::initialize() {
  init_common(dlss(net_).assignment);
}

void CtcaWorld::initialize_with(const PowerAssignment& start) {
  if (start.size() != static_cast<std::size_t>(net_.size())) {
    throw std::invalid_argument("initialize_with: assignment size mismatch");
  }
  for (NodeId i = 0; i < net_.size(); ++i) {
    if (!net_.menu(i).index_of(start[i])) {
      throw std::invalid_argument("initialize_with: power not in node menu");
    }
  }
  init_common(start);
}

void CtcaWorld::init_common(const PowerAssignment& start) {
  const int n = net_.size();
  now_ = 0.0;

  // Hello at maximum power; every node learns its maximum-range neighborhood.
  for (NodeId i = 0; i < n; ++i) {
    broadcast_control(i, net_.p_max(), MsgKind::Hello, {}, nullptr);
  }
  for (NodeId i = 0; i < n; ++i) {
    NodeState& st = states_[i];
    st.menu = net_.menu(i).levels;
    st.menu_targets = net_.menu(i).targets;
    st.known.clear();
    for (NodeId j : net_.max_range_neighbors(i)) {
      NeighborRecord rec;
      rec.link_power = net_.link_power(i, j);
      st.known.emplace(j, std::move(rec));
    }
  }

  // Neighbor info at the top menu level: link powers, hence menus, of every
  // neighbor become local knowledge.
  for (NodeId i = 0; i < n; ++i) {
    if (!alive_[i]) continue;
    broadcast_control(i, states_[i].menu.back(), MsgKind::NeighborInfo, {}, nullptr);
  }
  for (NodeId i = 0; i < n; ++i) {
    for (auto& [j, rec] : states_[i].known) {
      rec.links_of.clear();
      for (NodeId x : net_.max_range_neighbors(j)) {
        rec.links_of.emplace_back(x, net_.link_power(j, x));
      }
      rec.menu_of = net_.menu(j).levels;
    }
  }

  // Power determination (DLSS or the injected assignment).
  for (NodeId i = 0; i < n; ++i) {
    if (!alive_[i]) continue;
    states_[i].power = start[i];
    assignment_[i] = start[i];
  }

  // Power announcement at the top menu level, carrying current energy.
  for (NodeId i = 0; i < n; ++i) {
    if (!alive_[i]) continue;
    const double p_i = states_[i].power;
    const double w_i = ledger_.remaining(i);
    broadcast_control(i, states_[i].menu.back(), MsgKind::PowerAnnounce, {},
                      [this, i, p_i, w_i](NodeId j) {
                        NeighborRecord& rec = states_[j].known.at(i);
                        rec.power = p_i;
                        rec.flag = false;
                        rec.energy = w_i;
                      });
  }
  // Compile reverse-link neighborhoods from the announced powers.
  for (NodeId i = 0; i < n; ++i) {
    for (auto& [j, rec] : states_[i].known) {
      rec.in_reverse = alive_[j] && rec.power >= 0.0 && rec.link_power <= rec.power;
    }
  }

  // Initial S computation and broadcast at the adopted power.
  for (NodeId i = 0; i < n; ++i) {
    if (!alive_[i]) continue;
    states_[i].flag = able_to_reduce_local(i).can_reduce;
    const bool s_i = states_[i].flag;
    broadcast_control(i, states_[i].power, MsgKind::StatusFlag, {},
                      [this, i, s_i](NodeId j) { states_[j].known.at(i).flag = s_i; });
  }

  for (NodeId i = 0; i < n; ++i) {
    if (!alive_[i]) continue;
    bool any = false;
    for (const auto& [j, rec] : states_[i].known) {
      if (alive_[j] && rec.link_power <= states_[i].power) any = true;
    }
    if (!any) {
      throw std::runtime_error("ctca_initialize: node " + std::to_string(i) +
                               " has empty reachable set (InitFailure)");
    }
    states_[i].energy_info_shared = false;
  }
  round_ = 0;
}

ReduceDecision CtcaWorld::able_to_reduce_local(NodeId i) {
  NodeState& st = states_[i];
  ReduceDecision none{false, st.power, -1};
  if (st.menu.empty() || st.power <= st.menu.front()) return none;

  // N_c(i): the (smallest-id) node whose link defines the current power.
  std::size_t level = st.menu.size();
  for (std::size_t k = 0; k < st.menu.size(); ++k) {
    if (st.menu[k] == st.power) {
      level = k;
      break;
    }
  }
  if (level == st.menu.size() || level == 0) {
    anomalies_.push_back("stale: node " + std::to_string(i) +
                         " power not found in its menu");
    log(i, "stale_table", "power level not in menu");
    return none;
  }
  const NodeId definer = st.menu_targets[level];
  const auto def_it = st.known.find(definer);
  if (def_it == st.known.end() || def_it->second.energy < 0.0) {
    anomalies_.push_back("stale: node " + std::to_string(i) +
                         " cannot resolve power-defining neighbor");
    log(i, "stale_table", "definer unresolved");
    return none;
  }

  ReduceQuery q;
  q.current_power = st.power;
  q.remaining_energy = ledger_.remaining(i);
  q.menu = st.menu;
  q.definer = definer;
  q.definer_energy = alive_[definer] ? def_it->second.energy : 0.0;
  for (const auto& [j, rec] : st.known) {
    if (!alive_[j] || rec.link_power > st.power || j == definer) continue;
    ReduceWitness w;
    w.id = j;
    // p(definer, j) comes from j's announced link list.
    w.link_to_definer = -1.0;
    for (const auto& [x, p] : rec.links_of) {
      if (x == definer) {
        w.link_to_definer = p;
        break;
      }
    }
    if (w.link_to_definer < 0.0) continue;  // definer beyond j's maximum range
    w.covers_definer = rec.power >= 0.0 && w.link_to_definer <= rec.power;
    q.reachable.push_back(w);
  }
  return able_to_reduce_power(q);
}

void CtcaWorld::handle_power_update(NodeId receiver, NodeId from, double p, bool s) {
  NodeState& st = states_[receiver];
  auto it = st.known.find(from);
  if (it == st.known.end()) return;
  NeighborRecord& rec = it->second;
  rec.power = p;
  rec.flag = s;
  if (rec.in_reverse && p < rec.link_power) {
    rec.in_reverse = false;  // from no longer covers us
    log(receiver, "reverse_drop", std::to_string(from));
  }
  if (rec.link_power <= st.power) {
    const bool before = st.flag;
    st.flag = able_to_reduce_local(receiver).can_reduce;
    if (st.flag != before) {
      const bool s_now = st.flag;
      broadcast_control(receiver, st.power, MsgKind::StatusFlag, {},
                        [this, receiver, s_now](NodeId j) {
                          auto jt = states_[j].known.find(receiver);
                          if (jt != states_[j].known.end()) jt->second.flag = s_now;
                        });
      if (round_rng_ != nullptr) {
        Rng& rng = *round_rng_;
        const NodeId who = receiver;
        schedule(now_ + rng.uniform(0.0, cfg_.t1), [this, who, &rng] { napa(who, rng); });
      }
    }
  }
}

void CtcaWorld::handle_neighbor_info_request(NodeId receiver, NodeId from) {
  NodeState& st = states_[receiver];
  auto it = st.known.find(from);
  if (it == st.known.end()) return;
  if (it->second.in_reverse) return;  // already tracking the requester
  const double w = ledger_.remaining(receiver);
  const double p = st.power;
  const bool s = st.flag;
  unicast_control(receiver, st.power, MsgKind::NeighborInfoReply, from,
                  [this, receiver, w, p, s](NodeId j) {
                    auto jt = states_[j].known.find(receiver);
                    if (jt == states_[j].known.end()) return;
                    jt->second.power = p;
                    jt->second.flag = s;
                    jt->second.energy = w;
                  });
  it->second.in_reverse = true;
}

void CtcaWorld::handle_energy_request(NodeId receiver) {
  NodeState& st = states_[receiver];
  if (st.energy_info_shared) return;
  const double w = ledger_.remaining(receiver);
  broadcast_control(receiver, st.power, MsgKind::EnergyBroadcast, {},
                    [this, receiver, w](NodeId j) {
                      auto jt = states_[j].known.find(receiver);
                      if (jt != states_[j].known.end()) jt->second.energy = w;
                    });
  st.energy_info_shared = true;
}

void CtcaWorld::kickoff(NodeId i, Rng& rng) {
  if (!alive_[i]) return;
  NodeState& st = states_[i];
  if (!st.energy_info_shared) {
    const double w = ledger_.remaining(i);
    broadcast_control(i, st.power, MsgKind::EnergyBroadcast, {},
                      [this, i, w](NodeId j) {
                        auto jt = states_[j].known.find(i);
                        if (jt != states_[j].known.end()) jt->second.energy = w;
                      });
    st.energy_info_shared = true;
  }
  broadcast_control(i, st.power, MsgKind::EnergyRequest, {},
                    [this](NodeId j) { handle_energy_request(j); });
  schedule(now_ + rng.uniform(0.0, cfg_.t1), [this, i, &rng] { napa(i, rng); });
}

void CtcaWorld::napa(NodeId i, Rng& rng) {
  if (!alive_[i]) return;
  NodeState& st = states_[i];
  if (st.napa_runs >= cfg_.q_max) return;
  st.napa_runs += 1;

  // Estimate reverse-link neighbors' potential lifetimes from cached state:
  // one menu level below the current power when the neighbor says it can
  // reduce, the current power otherwise.
  NodeId m = -1;
  double m_lifetime = 0.0;
  for (const auto& [j, rec] : st.known) {
    if (!alive_[j] || !rec.in_reverse) continue;
    if (rec.power < 0.0 || rec.energy < 0.0) {
      log(i, "stale_table", "missing power/energy for " + std::to_string(j));
      continue;
    }
    double assumed_power = rec.power;
    if (rec.flag) {
      std::size_t k = rec.menu_of.size();
      for (std::size_t t = 0; t < rec.menu_of.size(); ++t) {
        if (rec.menu_of[t] == rec.power) {
          k = t;
          break;
        }
      }
      if (k != rec.menu_of.size() && k > 0) assumed_power = rec.menu_of[k - 1];
    }
    const double l = estimated_lifetime(rec.energy, assumed_power);
    if (m < 0 || l < m_lifetime) {
      m = j;
      m_lifetime = l;
    }
  }

  ReduceDecision reduce = able_to_reduce_local(i);
  st.flag = reduce.can_reduce;
  bool can_help = false;

  if (m >= 0) {
    const NeighborRecord& mrec = st.known.at(m);
    // Conditions (1) and (2): m cannot reduce on its own and is not already
    // at its menu minimum.
    if (!mrec.flag && !mrec.menu_of.empty() && mrec.power > mrec.menu_of.front()) {
      // N_c(m): smallest-id node at exactly m's current power.
      NodeId ncm = -1;
      for (const auto& [x, p] : mrec.links_of) {
        if (p == mrec.power) {
          ncm = x;
          break;
        }
      }
      if (ncm < 0) {
        log(i, "stale_table", "cannot resolve c(m) for " + std::to_string(m));
      } else if (ncm != i) {
        const auto own = st.known.find(ncm);
        // Condition (3): c(m) within our maximum range, at a power above the
        // current one (helping means raising).
        if (own != st.known.end() && own->second.link_power > st.power) {
          const double raise_to = own->second.link_power;
          // Condition (4): our lifetime at the raised power still beats the
          // neighborhood's potential lifetime.
          if (estimated_lifetime(ledger_.remaining(i), raise_to) > m_lifetime) {
            st.power = raise_to;
            assignment_[i] = raise_to;
            log(i, "raise", "to " + fmt_power(raise_to) + " helping " + std::to_string(m));
            broadcast_control(i, st.power, MsgKind::NeighborInfoRequest, {},
                              [this, i](NodeId j) { handle_neighbor_info_request(j, i); });
            reduce = able_to_reduce_local(i);
            st.flag = reduce.can_reduce;
            // Inform reachable and reverse-link neighbors of (p_i, S_i).
            std::vector<NodeId> beyond;
            for (const auto& [j, rec] : st.known) {
              if (rec.in_reverse && alive_[j] && rec.link_power > st.power) {
                beyond.push_back(j);
              }
            }
            const double p_now = st.power;
            const bool s_now = st.flag;
            broadcast_control(i, st.power, MsgKind::PowerAnnounce, beyond,
                              [this, i, p_now, s_now](NodeId j) {
                                handle_power_update(j, i, p_now, s_now);
                              });
            can_help = true;
          }
        }
      }
    }
  }

  if (!can_help && reduce.can_reduce && st.power > reduce.reduced_power) {
    const double old_power = st.power;
    st.power = reduce.reduced_power;
    assignment_[i] = reduce.reduced_power;
    log(i, "reduce", "to " + fmt_power(st.power));
    reduce = able_to_reduce_local(i);
    st.flag = reduce.can_reduce;
    std::vector<NodeId> beyond;
    for (const auto& [j, rec] : st.known) {
      if (rec.in_reverse && alive_[j] && rec.link_power > old_power) beyond.push_back(j);
    }
    const double p_now = st.power;
    const bool s_now = st.flag;
    broadcast_control(i, old_power, MsgKind::PowerAnnounce, beyond,
                      [this, i, p_now, s_now](NodeId j) {
                        handle_power_update(j, i, p_now, s_now);
                      });
    // The local rule is sufficient, not necessary; a committed reduction that
    // breaks global connectivity is recorded, never silently repaired.
    if (!is_strongly_connected_among(net_, assignment_, alive_)) {
      anomalies_.push_back("reduction by node " + std::to_string(i) +
                           " disconnected the live graph in round " +
                           std::to_string(round_));
      log(i, "reduction_disconnect", "");
    }
  }

  if (alive_[i] && st.flag && st.napa_runs < cfg_.q_max) {
    schedule(now_ + rng.uniform(0.0, cfg_.t1), [this, i, &rng] { napa(i, rng); });
  }
}

void CtcaWorld::run_round(Rng& rng) {
  if (alive_count() == 0) {
    throw std::runtime_error("run_round: no node alive");
  }
  if (!is_strongly_connected_among(net_, assignment_, alive_)) {
    throw std::runtime_error("run_round: graph disconnected on entry (RoundAborted)");
  }
  round_ += 1;
  const double base = static_cast<double>(round_ - 1) * cfg_.t3;
  now_ = base;
  for (NodeState& st : states_) {
    st.napa_runs = 0;
    st.messages_sent = 0;
  }
  std::vector<NodeId> order;
  for (NodeId i = 0; i < net_.size(); ++i) {
    if (alive_[i]) order.push_back(i);
  }
  rng.shuffle(order);
  round_rng_ = &rng;
  for (NodeId i : order) {
    schedule(base, [this, i, &rng] { kickoff(i, rng); });
  }
  drain_queue();
  round_rng_ = nullptr;
  // T2: energy caches go stale, everyone will re-share next round.
  for (NodeState& st : states_) st.energy_info_shared = false;
  now_ = base + cfg_.t3;
}

}  // namespace ctca

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ctca {

using NodeId = std::int32_t;

// First-order radio model. Transmitting k bits over distance d costs
// E_elec*k plus the amplifier term: eps_fs*d^2*k in free space (d < d0) or
// eps_mp*d^4*k on the multi-path channel (d >= d0). Receiving costs E_elec*k.
struct RadioParams {
  double e_elec = 50e-9;       // J/bit, radio electronics
  double eps_fs = 10e-12;      // J/bit/m^2, free-space amplifier
  double eps_mp = 0.0013e-12;  // J/bit/m^4, multi-path amplifier
  double d0 = 87.8;            // m, channel threshold (~sqrt(eps_fs/eps_mp))
};

double tx_energy(double distance_m, double bits, const RadioParams& radio);
double rx_energy(double bits, const RadioParams& radio);

enum class EnergyCategory { TxData, RxData, TxControl, RxControl };

struct DeathEvent {
  NodeId node;
};

// Per-node energy bookkeeping. Energy never goes negative: the debit that
// exhausts a node is clipped at the remaining charge, which keeps
// initial == remaining + sum(debits) exact in double arithmetic.
class EnergyLedger {
 public:
  explicit EnergyLedger(std::vector<double> initial);

  std::size_t size() const { return remaining_.size(); }
  double initial(NodeId i) const { return initial_[check(i)]; }
  double remaining(NodeId i) const { return remaining_[check(i)]; }
  bool alive(NodeId i) const { return remaining_[check(i)] > 0.0; }
  double debited(NodeId i, EnergyCategory cat) const {
    return debits_[check(i)][static_cast<int>(cat)];
  }

  // Returns a DeathEvent when this debit drains the node to zero.
  std::optional<DeathEvent> debit(NodeId i, double joules, EnergyCategory cat);

  std::vector<double> snapshot() const { return remaining_; }

 private:
  std::size_t check(NodeId i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= remaining_.size()) {
      throw std::out_of_range("EnergyLedger: unknown node id");
    }
    return static_cast<std::size_t>(i);
  }

  std::vector<double> initial_;
  std::vector<double> remaining_;
  std::vector<std::array<double, 4>> debits_;
};

}  // namespace ctca

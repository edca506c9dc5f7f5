#include "ctca/radio_energy.hpp"

#include <stdexcept>

namespace ctca {

double tx_energy(double distance_m, double bits, const RadioParams& radio) {
  if (distance_m < 0.0 || bits < 0.0) {
    throw std::invalid_argument("tx_energy: negative distance or bit count");
  }
  const double d2 = distance_m * distance_m;
  // At d == d0 exactly the multi-path branch applies.
  const double amp = distance_m < radio.d0 ? radio.eps_fs * d2 : radio.eps_mp * d2 * d2;
  return (radio.e_elec + amp) * bits;
}

double rx_energy(double bits, const RadioParams& radio) {
  if (bits < 0.0) {
    throw std::invalid_argument("rx_energy: negative bit count");
  }
  return radio.e_elec * bits;
}

EnergyLedger::EnergyLedger(std::vector<double> initial)
    : initial_(initial),
      remaining_(std::move(initial)),
      debits_(remaining_.size(), {0.0, 0.0, 0.0, 0.0}) {
  for (double w : remaining_) {
    if (w < 0.0) throw std::invalid_argument("EnergyLedger: negative initial energy");
  }
}

std::optional<DeathEvent> EnergyLedger::debit(NodeId i, double joules, EnergyCategory cat) {
  if (joules < 0.0) throw std::invalid_argument("EnergyLedger: negative debit");
  const std::size_t k = check(i);
  if (remaining_[k] <= 0.0 || joules == 0.0) return std::nullopt;
  const double charged = joules < remaining_[k] ? joules : remaining_[k];
  remaining_[k] -= charged;
  debits_[k][static_cast<int>(cat)] += charged;
  if (remaining_[k] <= 0.0) {
    remaining_[k] = 0.0;
    return DeathEvent{i};
  }
  return std::nullopt;
}

}  // namespace ctca

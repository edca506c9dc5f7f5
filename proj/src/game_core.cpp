#include "ctca/game_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctca {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double estimated_lifetime(double energy_j, double power_j_per_bit) {
  if (energy_j <= 0.0) return 0.0;
  if (power_j_per_bit <= 0.0) return kInf;
  return energy_j / power_j_per_bit;
}

bool lifetime_gt(double a, double b) {
  if (a == b) return false;  // covers inf vs inf
  if (std::isinf(a) && a > 0.0) return true;
  if (std::isinf(b) && b > 0.0) return false;
  const double scale = std::max(std::abs(a), std::abs(b));
  const double tol = std::max(kLifetimeAbsBandBits, kLifetimeRelTol * scale);
  return a > b + tol;
}

double potential_power(const GameView& view, NodeId i) {
  const PowerMenu& menu = view.net->menu(i);
  for (double a : menu.levels) {
    if (a > view.assignment[i]) break;
    if (is_strongly_connected(*view.net, view.assignment.with(i, a))) return a;
  }
  // The current power is always a witness on a connected view.
  return view.assignment[i];
}

double potential_lifetime(const GameView& view, NodeId i) {
  return estimated_lifetime(view.energies[i], potential_power(view, i));
}

NodeId min_reverse_neighbor(const GameView& view, NodeId i) {
  NodeId best = -1;
  double best_l = kInf;
  for (NodeId j : reverse_link_set(*view.net, view.assignment, i)) {
    const double l = potential_lifetime(view, j);
    if (best < 0 || l < best_l) {
      best = j;
      best_l = l;
    }
  }
  if (best < 0) {
    throw std::runtime_error("min_reverse_neighbor: empty reverse-link neighborhood");
  }
  return best;
}

double reverse_neighborhood_potential(const GameView& base, const GameView& view,
                                      NodeId i) {
  double out = kInf;
  for (NodeId j : reverse_link_set(*base.net, base.assignment, i)) {
    out = std::min(out, potential_lifetime(view, j));
  }
  return out;
}

std::vector<double> preferred_powers(const GameView& view, NodeId i) {
  const double previous = reverse_neighborhood_potential(view, view, i);
  std::vector<double> out;
  if (std::isinf(previous)) return out;  // nobody to help
  for (double a : view.net->menu(i).levels) {
    const GameView dev = view.with(i, a);
    const double raised = reverse_neighborhood_potential(view, dev, i);
    const double own = estimated_lifetime(view.energies[i], a);
    if (lifetime_gt(raised, previous) && lifetime_gt(own, previous)) {
      out.push_back(a);
    }
  }
  return out;
}

double utility(const GameView& view, NodeId i, double a) {
  if (!local_connectivity(*view.net, view.assignment, i, a)) return 0.0;
  const GameView dev = view.with(i, a);
  const double own = estimated_lifetime(view.energies[i], a);
  const double hood = reverse_neighborhood_potential(view, dev, i);
  const std::vector<double> preferred = preferred_powers(view, i);
  const bool secondary =
      preferred.empty() ||
      std::find(preferred.begin(), preferred.end(), a) != preferred.end();
  const double primary = std::min(hood, own);
  return primary + (secondary ? own : 0.0);
}

double potential_value(const GameView& view) {
  if (!is_strongly_connected(*view.net, view.assignment)) return 0.0;
  double out = kInf;
  for (NodeId i = 0; i < view.net->size(); ++i) {
    out = std::min(out, potential_lifetime(view, i));
  }
  return out;
}

namespace {

int banded_sign(double delta, double scale) {
  const double band = std::max(kLifetimeAbsBandBits, kLifetimeRelTol * scale);
  if (delta > band) return 1;
  if (delta < -band) return -1;
  return 0;
}

}  // namespace

SignCheck sign_consistency(const GameView& view, NodeId i, double a, double a_prime) {
  const double u_a = utility(view, i, a);
  const double u_b = utility(view, i, a_prime);
  const double phi_a = potential_value(view.with(i, a));
  const double phi_b = potential_value(view.with(i, a_prime));
  SignCheck out;
  out.delta_u = u_a - u_b;
  out.delta_phi = phi_a - phi_b;
  const int su = banded_sign(out.delta_u, std::max(std::abs(u_a), std::abs(u_b)));
  const int sp = banded_sign(out.delta_phi, std::max(std::abs(phi_a), std::abs(phi_b)));
  // The ordinal-game requirement is an iff on improvement: a unilateral move
  // raises the utility exactly when it raises the potential. Non-positive
  // deltas on both sides are compatible whatever their magnitudes.
  if (su == 0 && sp == 0) {
    out.verdict = SignVerdict::BothZero;
  } else if ((su > 0) == (sp > 0)) {
    out.verdict = SignVerdict::Consistent;
  } else {
    out.verdict = SignVerdict::Violated;
  }
  return out;
}

ReduceDecision able_to_reduce_power(const ReduceQuery& q) {
  ReduceDecision out;
  out.reduced_power = q.current_power;
  if (q.menu.empty() || q.current_power <= q.menu.front()) return out;
  std::size_t level = q.menu.size();
  for (std::size_t k = 0; k < q.menu.size(); ++k) {
    if (q.menu[k] == q.current_power) {
      level = k;
      break;
    }
  }
  if (level == q.menu.size() || level == 0) {
    throw std::runtime_error("able_to_reduce_power: current power not in menu (stale table)");
  }
  const double own_lifetime = estimated_lifetime(q.remaining_energy, q.current_power);
  for (const ReduceWitness& w : q.reachable) {
    if (!w.covers_definer) continue;
    const double definer_via_witness =
        estimated_lifetime(q.definer_energy, w.link_to_definer);
    if (own_lifetime < definer_via_witness) {
      out.can_reduce = true;
      out.reduced_power = q.menu[level - 1];
      out.witness = w.id;
      return out;
    }
  }
  return out;
}

ReduceDecision able_to_reduce_power(const GameView& view, NodeId i) {
  const PowerMenu& menu = view.net->menu(i);
  ReduceQuery q;
  q.current_power = view.assignment[i];
  q.remaining_energy = view.energies[i];
  q.menu = menu.levels;
  const auto level = menu.index_of(q.current_power);
  if (!level) {
    throw std::runtime_error("able_to_reduce_power: assignment not menu-valued");
  }
  q.definer = menu.targets[*level];
  q.definer_energy = view.energies[q.definer];
  for (NodeId j : reachable_set(*view.net, view.assignment, i)) {
    ReduceWitness w;
    w.id = j;
    w.link_to_definer = view.net->link_power(q.definer, j);
    w.covers_definer = j != q.definer && w.link_to_definer <= view.assignment[j];
    q.reachable.push_back(w);
  }
  return able_to_reduce_power(q);
}

}  // namespace ctca

#pragma once

#include <span>
#include <vector>

#include "ctca/net_model.hpp"

namespace ctca {

// Lifetime comparisons span ~14 orders of magnitude (joules over nJ/bit), so
// strictness and sign tests run with a relative tolerance plus an absolute
// zero band in bits.
inline constexpr double kLifetimeRelTol = 1e-12;
inline constexpr double kLifetimeAbsBandBits = 1e-6;

// Estimated lifetime L = W/p in bits; +inf for an idle node with energy left,
// 0 once the energy is gone.
double estimated_lifetime(double energy_j, double power_j_per_bit);

// a strictly greater than b beyond the tolerance band.
bool lifetime_gt(double a, double b);

// One joint state of the game: an assignment, the energies it is evaluated
// at, and the deployment that defines menus and connectivity.
struct GameView {
  const NetworkInstance* net = nullptr;
  PowerAssignment assignment;
  std::vector<double> energies;

  GameView(const NetworkInstance& n, PowerAssignment p, std::vector<double> w)
      : net(&n), assignment(std::move(p)), energies(std::move(w)) {}

  double lifetime(NodeId i) const {
    return estimated_lifetime(energies[i], assignment[i]);
  }
  GameView with(NodeId i, double a) const {
    GameView out = *this;
    out.assignment[i] = a;
    return out;
  }
};

// p'_i: the smallest menu power node i could unilaterally adopt with the
// graph still strongly connected. Global-knowledge oracle; the protocol's
// local counterpart is able_to_reduce_power below.
double potential_power(const GameView& view, NodeId i);

// L'_i = W_i / p'_i.
double potential_lifetime(const GameView& view, NodeId i);

// m(i): the reverse-link neighbor with the smallest potential lifetime,
// ties to the smaller id. Throws when I_i is empty.
NodeId min_reverse_neighbor(const GameView& view, NodeId i);

// min over j in I_i of L'_j, evaluated under `view` (I_i itself is taken
// from `base` and is unaffected by i's own power). +inf when I_i is empty.
double reverse_neighborhood_potential(const GameView& base, const GameView& view,
                                      NodeId i);

// K_i: menu levels at which i both raises its reverse-link neighborhood's
// potential lifetime above the current value and keeps its own estimated
// lifetime above that previous value.
std::vector<double> preferred_powers(const GameView& view, NodeId i);

// u_i(a) = c_i(a) * [ min(L'_{m(i)}({i->a, P_-i}), L_i(a)) + l_i(a) * L_i(a) ].
double utility(const GameView& view, NodeId i, double a);

// Phi(P) = C(P) * min_i L'_i.
double potential_value(const GameView& view);

enum class SignVerdict { Consistent, Violated, BothZero };

struct SignCheck {
  SignVerdict verdict;
  double delta_u = 0.0;
  double delta_phi = 0.0;
};

// Compares sign(u_i(a) - u_i(a')) against sign(Phi({i->a}) - Phi({i->a'})),
// with deltas inside the zero band treated as zero.
SignCheck sign_consistency(const GameView& view, NodeId i, double a, double a_prime);

// ---- AbleToReducePower: the node-local reduction rule ----
//
// The node defining i's current power (its farthest current neighbor) is the
// `definer`. i may step one menu level down when some reachable neighbor j
// currently covers the definer and i's estimated lifetime is below the
// definer's lifetime were it to transmit toward j.

struct ReduceWitness {
  NodeId id = -1;
  double link_to_definer = 0.0;  // p(definer, j)
  bool covers_definer = false;   // p(definer, j) <= p_j
};

struct ReduceQuery {
  double current_power = 0.0;
  double remaining_energy = 0.0;
  std::span<const double> menu;  // ascending
  NodeId definer = -1;
  double definer_energy = 0.0;  // W_{c(i)}
  std::vector<ReduceWitness> reachable;
};

struct ReduceDecision {
  bool can_reduce = false;
  double reduced_power = 0.0;  // one level down when can_reduce, else current
  NodeId witness = -1;
};

ReduceDecision able_to_reduce_power(const ReduceQuery& q);

// Perfect-knowledge assembly of the rule from a game view (oracle-side tests
// and the initialization phase, where tables mirror the ground truth).
ReduceDecision able_to_reduce_power(const GameView& view, NodeId i);

}  // namespace ctca

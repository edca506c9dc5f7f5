#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles verify
// library results through different algorithms (Floyd-Warshall reachability,
// exhaustive enumeration) and must stay independent of the implementation
// paths they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ctca/game_core.hpp"
#include "ctca/net_model.hpp"

namespace ctca::testing {

// Three collinear nodes at x = 0, 40, 110 — the cooperative-raise story.
// Narrative names: A = node 0, C = node 1 (middle), B = node 2.
// Link powers: A-C 66 nJ/bit, C-B 99 nJ/bit, A-B ~240.33 nJ/bit.
inline NetworkInstance three_node_line(double energy_j = 40e3) {
  const RadioParams radio;
  const double p_max = tx_energy(140.0, 1.0, radio);
  return NetworkInstance({{0.0, 0.0}, {40.0, 0.0}, {110.0, 0.0}},
                         std::vector<double>(3, energy_j), radio, p_max);
}

inline constexpr NodeId kA = 0;
inline constexpr NodeId kC = 1;
inline constexpr NodeId kB = 2;

// The stuck assignment: A covers everyone, C and B cover one hop each, and
// nobody can unilaterally reduce.
inline PowerAssignment stuck_assignment(const NetworkInstance& net) {
  PowerAssignment p;
  p.power = {net.menu(kA).levels[1], net.menu(kC).levels[0], net.menu(kB).levels[0]};
  return p;
}

// After the middle node's cooperative raise.
inline PowerAssignment raised_assignment(const NetworkInstance& net) {
  PowerAssignment p;
  p.power = {net.menu(kA).levels[1], net.menu(kC).levels[1], net.menu(kB).levels[0]};
  return p;
}

// Four nodes where node 2 (of the 0-indexed set {0,1,2,3}) must raise toward
// node 1 so that node 0 can step down:
//   node 0 at (0,0), node 1 at (110,0), node 2 at (50,0), node 3 at (50,40).
// Initial powers: 0 -> link(0,1), 1 -> link(1,2), 2 -> link(2,0), 3 -> link(3,2).
inline NetworkInstance four_node_help(double energy_j = 40e3) {
  const RadioParams radio;
  const double p_max = tx_energy(120.0, 1.0, radio);
  return NetworkInstance({{0.0, 0.0}, {110.0, 0.0}, {50.0, 0.0}, {50.0, 40.0}},
                         std::vector<double>(4, energy_j), radio, p_max);
}

inline PowerAssignment four_node_initial(const NetworkInstance& net) {
  PowerAssignment p;
  p.power = {net.link_power(0, 1), net.link_power(1, 2), net.link_power(2, 0),
             net.link_power(3, 2)};
  return p;
}

// Floyd-Warshall reachability: an oracle for strong connectivity independent
// of the BFS sweeps used by the library.
inline bool oracle_strongly_connected(const NetworkInstance& net,
                                      const PowerAssignment& p) {
  const int n = net.size();
  if (n == 1) return true;
  std::vector<char> reach(static_cast<std::size_t>(n) * n, 0);
  for (NodeId i = 0; i < n; ++i) {
    reach[i * n + i] = 1;
    for (NodeId j = 0; j < n; ++j) {
      if (i != j && net.link_power(i, j) <= p[i]) reach[i * n + j] = 1;
    }
  }
  for (NodeId k = 0; k < n; ++k) {
    for (NodeId i = 0; i < n; ++i) {
      if (!reach[i * n + k]) continue;
      for (NodeId j = 0; j < n; ++j) {
        if (reach[k * n + j]) reach[i * n + j] = 1;
      }
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (!reach[i * n + j]) return false;
    }
  }
  return true;
}

// Exhaustive potential power: smallest menu level that keeps the oracle
// connectivity intact.
inline double oracle_potential_power(const GameView& view, NodeId i) {
  for (double a : view.net->menu(i).levels) {
    if (a > view.assignment[i]) break;
    if (oracle_strongly_connected(*view.net, view.assignment.with(i, a))) return a;
  }
  return view.assignment[i];
}

// Brute-force max-min estimated lifetime over every menu-valued assignment
// that stays strongly connected. Only sane for small n.
inline double brute_force_maxmin(const NetworkInstance& net,
                                 const std::vector<double>& energies) {
  const int n = net.size();
  std::vector<std::size_t> pick(n, 0);
  PowerAssignment p;
  p.power.assign(n, 0.0);
  double best = -1.0;
  while (true) {
    double worst = std::numeric_limits<double>::infinity();
    for (NodeId i = 0; i < n; ++i) {
      p[i] = net.menu(i).levels[pick[i]];
      worst = std::min(worst, energies[i] / p[i]);
    }
    if (worst > best && oracle_strongly_connected(net, p)) best = worst;
    int carry = n - 1;
    while (carry >= 0) {
      if (++pick[carry] < net.menu(carry).levels.size()) break;
      pick[carry] = 0;
      --carry;
    }
    if (carry < 0) break;
  }
  return best;
}

}  // namespace ctca::testing

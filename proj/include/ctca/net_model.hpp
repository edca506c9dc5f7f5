#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ctca/radio_energy.hpp"

namespace ctca {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

// Per-bit transmit energy needed for a's transmissions to reach b (and, by
// symmetry of the formula, vice versa).
double min_link_power(Position a, Position b, const RadioParams& radio);

// A node's available transmission powers: one level per distinct link power
// to a node within maximum range, ascending. Each level remembers the
// smallest-id node whose reach defines it.
struct PowerMenu {
  std::vector<double> levels;
  std::vector<NodeId> targets;

  bool empty() const { return levels.empty(); }
  double min() const { return levels.front(); }
  double max() const { return levels.back(); }
  std::optional<std::size_t> index_of(double level) const;
  // Largest level <= cap; nullopt when even the smallest exceeds cap.
  std::optional<double> highest_within(double cap) const;
};

// Immutable deployment: positions, initial energies, radio parameters and the
// shared maximum transmission power. Link powers and menus are precomputed.
// Construction rejects deployments that are not strongly connected with every
// node at maximum power.
class NetworkInstance {
 public:
  NetworkInstance(std::vector<Position> positions, std::vector<double> energies,
                  RadioParams radio, double p_max);

  // Skips the connectivity/size validation (test fixtures, degenerate cases).
  static NetworkInstance unchecked(std::vector<Position> positions,
                                   std::vector<double> energies, RadioParams radio,
                                   double p_max);

  int size() const { return static_cast<int>(positions_.size()); }
  Position position(NodeId i) const { return positions_[i]; }
  double initial_energy(NodeId i) const { return energies_[i]; }
  std::vector<double> initial_energies() const { return energies_; }
  const RadioParams& radio() const { return radio_; }
  double p_max() const { return p_max_; }

  double link_power(NodeId a, NodeId b) const { return links_[idx(a, b)]; }
  bool in_range(NodeId a, NodeId b) const {
    return a != b && links_[idx(a, b)] <= p_max_;
  }
  const PowerMenu& menu(NodeId i) const { return menus_[i]; }
  // R_i(0): nodes within maximum range, ascending id.
  const std::vector<NodeId>& max_range_neighbors(NodeId i) const {
    return neighbors_[i];
  }

 private:
  NetworkInstance() = default;
  void build_tables();
  std::size_t idx(NodeId a, NodeId b) const {
    return static_cast<std::size_t>(a) * positions_.size() + static_cast<std::size_t>(b);
  }

  std::vector<Position> positions_;
  std::vector<double> energies_;
  RadioParams radio_;
  double p_max_ = 0.0;
  std::vector<double> links_;
  std::vector<PowerMenu> menus_;
  std::vector<std::vector<NodeId>> neighbors_;
};

PowerMenu build_power_menu(NodeId i, const NetworkInstance& net);

// The game's joint action: one power level per node, 0 marking a dead node.
struct PowerAssignment {
  std::vector<double> power;

  PowerAssignment() = default;
  explicit PowerAssignment(std::vector<double> p) : power(std::move(p)) {}

  double operator[](NodeId i) const { return power[static_cast<std::size_t>(i)]; }
  double& operator[](NodeId i) { return power[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return power.size(); }

  // Unilateral substitution {N_i -> a, P_-i}.
  PowerAssignment with(NodeId i, double a) const {
    PowerAssignment out = *this;
    out[i] = a;
    return out;
  }
};

// Nodes j != i with link_power(i, j) <= P[i], ascending id.
std::vector<NodeId> reachable_set(const NetworkInstance& net, const PowerAssignment& p,
                                  NodeId i);
// Nodes j != i with link_power(j, i) <= P[j], ascending id.
std::vector<NodeId> reverse_link_set(const NetworkInstance& net, const PowerAssignment& p,
                                     NodeId i);

// Directed strong connectivity of the graph {(i,j) : j reachable from i}.
// A node at power 0 has no outgoing edges and therefore fails the check for
// n > 1. `alive` masks nodes out of the graph entirely.
bool is_strongly_connected(const NetworkInstance& net, const PowerAssignment& p);
bool is_strongly_connected_among(const NetworkInstance& net, const PowerAssignment& p,
                                 const std::vector<bool>& alive);

// c_i(a_i): whether node i, set to power a_i with everyone else unchanged,
// still has a directed path to every member of its current reachable set.
bool local_connectivity(const NetworkInstance& net, const PowerAssignment& p, NodeId i,
                        double a_i);

// Deployment file: header line "# side_m n seed", then one node per line
// "id x_m y_m energy_J".
struct Deployment {
  double side_m = 0.0;
  std::uint64_t seed = 0;
  std::vector<Position> positions;
  std::vector<double> energies;
};

Deployment read_deployment(std::istream& in);
void write_deployment(const Deployment& d, std::ostream& out);

}  // namespace ctca

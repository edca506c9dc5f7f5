#pragma once

#include <vector>

#include "ctca/net_model.hpp"

namespace ctca {

// Output of a static topology-control algorithm: the power assignment and,
// per node, the neighbors whose links the construction retained.
struct StaticTopologyResult {
  PowerAssignment assignment;
  std::vector<std::vector<NodeId>> chosen_neighbors;
};

// Directed Local Spanning Subgraph: each node runs Kruskal over the
// mutual-range graph of its maximum-power neighborhood and transmits at the
// power of its heaviest incident tree edge.
StaticTopologyResult dlss(const NetworkInstance& net);

// Directed Relative Neighborhood Graph: edge (u,v) survives unless some
// witness w has max(p(u,w), p(w,v)) strictly below p(u,v).
StaticTopologyResult drng(const NetworkInstance& net);

// Control arm: everyone at the top of its menu.
StaticTopologyResult max_power(const NetworkInstance& net);

}  // namespace ctca

#include "ctca/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ctca {

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

void check_connected_input(const NetworkInstance& net) {
  PowerAssignment all_max;
  all_max.power.assign(net.size(), net.p_max());
  if (!is_strongly_connected(net, all_max)) {
    throw std::runtime_error("baseline: input not connected at p_max (InitFailure)");
  }
}

}  // namespace

StaticTopologyResult dlss(const NetworkInstance& net) {
  check_connected_input(net);
  const int n = net.size();
  StaticTopologyResult out;
  out.assignment.power.assign(n, 0.0);
  out.chosen_neighbors.resize(n);

  for (NodeId i = 0; i < n; ++i) {
    // Local vertex set: i and its maximum-range neighbors. Edges between any
    // two local vertices within mutual range, weighted by link power.
    std::vector<NodeId> verts{i};
    const auto& hood = net.max_range_neighbors(i);
    verts.insert(verts.end(), hood.begin(), hood.end());
    std::sort(verts.begin(), verts.end());
    std::vector<int> local(n, -1);
    for (std::size_t k = 0; k < verts.size(); ++k) local[verts[k]] = static_cast<int>(k);

    struct Edge {
      double w;
      NodeId u, v;
    };
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < verts.size(); ++a) {
      for (std::size_t b = a + 1; b < verts.size(); ++b) {
        if (net.in_range(verts[a], verts[b])) {
          edges.push_back({net.link_power(verts[a], verts[b]), verts[a], verts[b]});
        }
      }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      if (x.w != y.w) return x.w < y.w;
      if (x.u != y.u) return x.u < y.u;
      return x.v < y.v;
    });

    DisjointSet ds(verts.size());
    double power = 0.0;
    for (const Edge& e : edges) {
      if (!ds.unite(local[e.u], local[e.v])) continue;
      if (e.u == i || e.v == i) {
        power = std::max(power, e.w);
        out.chosen_neighbors[i].push_back(e.u == i ? e.v : e.u);
      }
    }
    if (out.chosen_neighbors[i].empty()) {
      throw std::runtime_error("dlss: node has no local tree edge (InitFailure)");
    }
    std::sort(out.chosen_neighbors[i].begin(), out.chosen_neighbors[i].end());
    out.assignment[i] = power;
  }
  return out;
}

StaticTopologyResult drng(const NetworkInstance& net) {
  check_connected_input(net);
  const int n = net.size();
  StaticTopologyResult out;
  out.assignment.power.assign(n, 0.0);
  out.chosen_neighbors.resize(n);

  for (NodeId u = 0; u < n; ++u) {
    double power = 0.0;
    for (NodeId v : net.max_range_neighbors(u)) {
      const double puv = net.link_power(u, v);
      bool pruned = false;
      for (NodeId w = 0; w < n && !pruned; ++w) {
        if (w == u || w == v) continue;
        if (net.link_power(u, w) < puv && net.link_power(w, v) < puv) pruned = true;
      }
      if (!pruned) {
        out.chosen_neighbors[u].push_back(v);
        power = std::max(power, puv);
      }
    }
    if (out.chosen_neighbors[u].empty()) {
      throw std::runtime_error("drng: node kept no edge (InitFailure)");
    }
    out.assignment[u] = power;
  }
  if (!is_strongly_connected(net, out.assignment)) {
    throw std::runtime_error("drng: output not strongly connected (InitFailure)");
  }
  return out;
}

StaticTopologyResult max_power(const NetworkInstance& net) {
  const int n = net.size();
  StaticTopologyResult out;
  out.assignment.power.assign(n, 0.0);
  out.chosen_neighbors.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    out.assignment[i] = net.menu(i).max();
    out.chosen_neighbors[i] = net.max_range_neighbors(i);
  }
  return out;
}

}  // namespace ctca

#include "ctca/optimal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ctca/game_core.hpp"

namespace ctca {

std::vector<WeightedEdge> edge_weights(const NetworkInstance& net,
                                       const std::vector<double>& energies) {
  std::vector<WeightedEdge> out;
  for (NodeId i = 0; i < net.size(); ++i) {
    if (energies[i] <= 0.0) continue;
    for (NodeId j : net.max_range_neighbors(i)) {
      out.push_back({i, j, net.link_power(i, j) / energies[i]});
    }
  }
  return out;
}

namespace {

// Strong connectivity on an explicit adjacency with a removal mask.
bool strongly_connected(const std::vector<std::vector<int>>& out_edges,
                        const std::vector<std::vector<int>>& in_edges,
                        const std::vector<char>& removed, std::size_t n,
                        const std::vector<WeightedEdge>& edges) {
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> queue;
  auto sweep = [&](bool forward) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, 0);
    seen[0] = 1;
    std::size_t found = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (int e : forward ? out_edges[u] : in_edges[u]) {
        if (removed[e]) continue;
        const NodeId v = forward ? edges[e].to : edges[e].from;
        if (!seen[v]) {
          seen[v] = 1;
          ++found;
          queue.push_back(v);
        }
      }
    }
    return found == n;
  };
  return sweep(true) && sweep(false);
}

}  // namespace

MaxMinResult optimal_maxmin(const NetworkInstance& net,
                            const std::vector<double>& energies) {
  const std::size_t n = static_cast<std::size_t>(net.size());
  std::vector<WeightedEdge> edges = edge_weights(net, energies);
  std::vector<std::vector<int>> out_edges(n), in_edges(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out_edges[edges[e].from].push_back(static_cast<int>(e));
    in_edges[edges[e].to].push_back(static_cast<int>(e));
  }
  std::vector<char> removed(edges.size(), 0);
  if (!strongly_connected(out_edges, in_edges, removed, n, edges)) {
    throw std::runtime_error("optimal_maxmin: input graph not strongly connected");
  }

  std::vector<int> order(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) order[e] = static_cast<int>(e);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (edges[a].weight != edges[b].weight) return edges[a].weight > edges[b].weight;
    if (edges[a].from != edges[b].from) return edges[a].from < edges[b].from;
    return edges[a].to < edges[b].to;
  });

  for (int e : order) {
    removed[e] = 1;
    if (!strongly_connected(out_edges, in_edges, removed, n, edges)) removed[e] = 0;
  }

  MaxMinResult result;
  result.assignment.power.assign(n, 0.0);
  double t_opt = std::numeric_limits<double>::infinity();
  for (NodeId i = 0; i < net.size(); ++i) {
    double p = 0.0;
    for (int e : out_edges[i]) {
      if (!removed[e]) p = std::max(p, net.link_power(i, edges[e].to));
    }
    result.assignment[i] = p;
    t_opt = std::min(t_opt, estimated_lifetime(energies[i], p));
  }
  result.t_opt_bits = t_opt;
  return result;
}

PriceReport average_price(const std::vector<PriceRound>& rounds) {
  if (rounds.empty()) {
    throw std::invalid_argument("average_price: no rounds");
  }
  PriceReport report;
  report.rounds = rounds;
  double sum = 0.0;
  std::size_t optimal = 0;
  for (const PriceRound& r : rounds) {
    if (r.t_alg <= 0.0) {
      throw std::invalid_argument("average_price: nonpositive algorithm lifetime");
    }
    const double ratio = r.ratio();
    sum += ratio;
    if (std::abs(ratio - 1.0) <= 1e-9) ++optimal;
  }
  report.mean_ratio = sum / static_cast<double>(rounds.size());
  report.percent_optimal =
      100.0 * static_cast<double>(optimal) / static_cast<double>(rounds.size());
  return report;
}

void write_price_csv(const std::vector<PriceRound>& rounds, std::ostream& out) {
  out << "round,t_opt_bits,t_ctca_bits,ratio\n";
  char buf[160];
  for (const PriceRound& r : rounds) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g\n", r.round, r.t_opt, r.t_alg,
                  r.ratio());
    out << buf;
  }
}

}  // namespace ctca

#pragma once

#include <iosfwd>
#include <vector>

#include "ctca/net_model.hpp"

namespace ctca {

// Directed edge weighted by the estimated lifetime the sender spends per bit
// crossing it: w_ij = p(N_i, N_j) / W_i.
struct WeightedEdge {
  NodeId from = -1;
  NodeId to = -1;
  double weight = 0.0;
};

// All directed edges within p_max whose sender still has energy.
std::vector<WeightedEdge> edge_weights(const NetworkInstance& net,
                                       const std::vector<double>& energies);

struct MaxMinResult {
  PowerAssignment assignment;
  double t_opt_bits = 0.0;
};

// Centralized max-min estimated-lifetime benchmark: drop directed edges in
// decreasing weight order whenever strong connectivity survives, then each
// node transmits to its farthest surviving out-neighbor. Throws on a
// disconnected input.
MaxMinResult optimal_maxmin(const NetworkInstance& net,
                            const std::vector<double>& energies);

struct PriceRound {
  int round = 0;
  double t_opt = 0.0;
  double t_alg = 0.0;
  double ratio() const { return t_opt / t_alg; }
};

struct PriceReport {
  double mean_ratio = 0.0;
  double percent_optimal = 0.0;  // share of rounds with ratio within 1e-9 of 1
  std::vector<PriceRound> rounds;
};

PriceReport average_price(const std::vector<PriceRound>& rounds);

// Rows of `round,t_opt_bits,t_ctca_bits,ratio`.
void write_price_csv(const std::vector<PriceRound>& rounds, std::ostream& out);

}  // namespace ctca

#include <doctest.h>

#include "ctca/baselines.hpp"
#include "ctca/experiment.hpp"
#include "support/fixtures.hpp"

using namespace ctca;
using namespace ctca::testing;

TEST_CASE("dlss on the three-node line drops the long edge") {
  const NetworkInstance net = three_node_line();
  const StaticTopologyResult r = dlss(net);
  CHECK(r.assignment[kA] == doctest::Approx(66e-9).epsilon(1e-12));
  CHECK(r.assignment[kC] == doctest::Approx(99e-9).epsilon(1e-12));
  CHECK(r.assignment[kB] == doctest::Approx(99e-9).epsilon(1e-12));
  CHECK(is_strongly_connected(net, r.assignment));
}

TEST_CASE("dlss on two nodes uses the single level") {
  const RadioParams radio;
  NetworkInstance net({{0.0, 0.0}, {40.0, 0.0}}, std::vector<double>(2, 1.0), radio,
                      tx_energy(60.0, 1.0, radio));
  const StaticTopologyResult r = dlss(net);
  CHECK(r.assignment[0] == net.menu(0).levels[0]);
  CHECK(r.assignment[1] == net.menu(1).levels[0]);
}

TEST_CASE("dlss keeps random instances strongly connected within menus") {
  Rng rng(101);
  for (int k = 0; k < 100; ++k) {
    const NetworkInstance net =
        random_connected_instance(20, 1000.0, 0.3, 1.0, rng);
    const StaticTopologyResult r = dlss(net);
    CHECK(oracle_strongly_connected(net, r.assignment));
    for (NodeId i = 0; i < net.size(); ++i) {
      CHECK(r.assignment[i] <= net.p_max());
      CHECK(net.menu(i).index_of(r.assignment[i]).has_value());
    }
  }
}

TEST_CASE("drng on the three-node line prunes the witnessed edge") {
  const NetworkInstance net = three_node_line();
  const StaticTopologyResult r = drng(net);
  CHECK(r.assignment[kA] == doctest::Approx(66e-9).epsilon(1e-12));
  CHECK(r.assignment[kC] == doctest::Approx(99e-9).epsilon(1e-12));
  CHECK(r.assignment[kB] == doctest::Approx(99e-9).epsilon(1e-12));
}

TEST_CASE("drng keeps all edges of an equilateral triangle") {
  const RadioParams radio;
  const double h = 50.0 * std::sqrt(3.0);
  NetworkInstance net({{0.0, 0.0}, {100.0, 0.0}, {50.0, h}}, std::vector<double>(3, 1.0),
                      radio, tx_energy(120.0, 1.0, radio));
  const StaticTopologyResult r = drng(net);
  for (NodeId i = 0; i < 3; ++i) {
    CHECK(r.chosen_neighbors[i].size() == 2);  // no strict witness anywhere
  }
}

TEST_CASE("dlss is never worse than drng per node on random instances") {
  Rng rng(202);
  for (int k = 0; k < 100; ++k) {
    const NetworkInstance net =
        random_connected_instance(20, 1000.0, 0.3, 1.0, rng);
    const StaticTopologyResult a = dlss(net);
    const StaticTopologyResult b = drng(net);
    CHECK(oracle_strongly_connected(net, b.assignment));
    for (NodeId i = 0; i < net.size(); ++i) {
      CHECK(a.assignment[i] <= b.assignment[i] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("max power puts every node at the top of its menu") {
  const NetworkInstance net = three_node_line();
  const StaticTopologyResult r = max_power(net);
  for (NodeId i = 0; i < net.size(); ++i) {
    CHECK(r.assignment[i] == net.menu(i).max());
  }
  CHECK(is_strongly_connected(net, r.assignment));
  SUBCASE("n=2 coincides with dlss") {
    const RadioParams radio;
    NetworkInstance two({{0.0, 0.0}, {40.0, 0.0}}, std::vector<double>(2, 1.0), radio,
                        tx_energy(60.0, 1.0, radio));
    CHECK(max_power(two).assignment.power == dlss(two).assignment.power);
  }
}

TEST_CASE("baselines reject disconnected inputs") {
  const RadioParams radio;
  NetworkInstance broken = NetworkInstance::unchecked(
      {{0.0, 0.0}, {500.0, 0.0}}, std::vector<double>(2, 1.0), radio,
      tx_energy(60.0, 1.0, radio));
  CHECK_THROWS(dlss(broken));
  CHECK_THROWS(drng(broken));
}

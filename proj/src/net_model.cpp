#include "ctca/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ctca {

double distance(Position a, Position b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double min_link_power(Position a, Position b, const RadioParams& radio) {
  return tx_energy(distance(a, b), 1.0, radio);
}

std::optional<std::size_t> PowerMenu::index_of(double level) const {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] == level) return k;
  }
  return std::nullopt;
}

std::optional<double> PowerMenu::highest_within(double cap) const {
  std::optional<double> best;
  for (double v : levels) {
    if (v <= cap) best = v;
  }
  return best;
}

NetworkInstance::NetworkInstance(std::vector<Position> positions,
                                 std::vector<double> energies, RadioParams radio,
                                 double p_max) {
  if (positions.size() < 2) {
    throw std::invalid_argument("NetworkInstance: need at least 2 nodes");
  }
  if (positions.size() != energies.size()) {
    throw std::invalid_argument("NetworkInstance: positions/energies size mismatch");
  }
  positions_ = std::move(positions);
  energies_ = std::move(energies);
  radio_ = radio;
  p_max_ = p_max;
  build_tables();
  for (NodeId i = 0; i < size(); ++i) {
    if (menus_[i].empty()) {
      throw std::runtime_error("NetworkInstance: node " + std::to_string(i) +
                               " has no neighbor within p_max (EmptyMenu)");
    }
  }
  PowerAssignment all_max;
  all_max.power.assign(positions_.size(), p_max_);
  if (!is_strongly_connected(*this, all_max)) {
    throw std::runtime_error("NetworkInstance: not strongly connected at p_max");
  }
}

NetworkInstance NetworkInstance::unchecked(std::vector<Position> positions,
                                           std::vector<double> energies,
                                           RadioParams radio, double p_max) {
  NetworkInstance net;
  net.positions_ = std::move(positions);
  net.energies_ = std::move(energies);
  net.radio_ = radio;
  net.p_max_ = p_max;
  net.build_tables();
  return net;
}

void NetworkInstance::build_tables() {
  const std::size_t n = positions_.size();
  links_.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double p = min_link_power(positions_[a], positions_[b], radio_);
      links_[a * n + b] = p;
      links_[b * n + a] = p;
    }
  }
  menus_.resize(n);
  neighbors_.resize(n);
  for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
    menus_[i] = build_power_menu(i, *this);
    neighbors_[i].clear();
    for (NodeId j = 0; j < static_cast<NodeId>(n); ++j) {
      if (in_range(i, j)) neighbors_[i].push_back(j);
    }
  }
}

PowerMenu build_power_menu(NodeId i, const NetworkInstance& net) {
  // Collect (power, id) pairs within p_max, sort by power then id, then
  // deduplicate equal powers keeping the smallest id as the level's target.
  std::vector<std::pair<double, NodeId>> within;
  for (NodeId j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    const double p = net.link_power(i, j);
    if (p <= net.p_max()) within.emplace_back(p, j);
  }
  std::sort(within.begin(), within.end());
  PowerMenu menu;
  for (const auto& [p, j] : within) {
    if (menu.levels.empty() || menu.levels.back() != p) {
      menu.levels.push_back(p);
      menu.targets.push_back(j);
    }
  }
  return menu;
}

std::vector<NodeId> reachable_set(const NetworkInstance& net, const PowerAssignment& p,
                                  NodeId i) {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < net.size(); ++j) {
    if (j != i && net.link_power(i, j) <= p[i]) out.push_back(j);
  }
  return out;
}

std::vector<NodeId> reverse_link_set(const NetworkInstance& net, const PowerAssignment& p,
                                     NodeId i) {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < net.size(); ++j) {
    if (j != i && net.link_power(j, i) <= p[j]) out.push_back(j);
  }
  return out;
}

namespace {

// Strong connectivity via forward and reverse BFS from the first live node.
bool strongly_connected_impl(const NetworkInstance& net, const PowerAssignment& p,
                             const std::vector<bool>* alive) {
  const int n = net.size();
  std::vector<NodeId> members;
  for (NodeId i = 0; i < n; ++i) {
    if (!alive || (*alive)[i]) members.push_back(i);
  }
  if (members.empty()) return false;
  if (members.size() == 1) return true;
  // A live node at power 0 (or below its cheapest link) cannot reach anyone.
  auto live = [&](NodeId i) { return !alive || (*alive)[i]; };

  std::vector<char> seen(n, 0);
  std::vector<NodeId> queue;
  auto sweep = [&](bool forward) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.clear();
    queue.push_back(members.front());
    seen[members.front()] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (NodeId v = 0; v < n; ++v) {
        if (v == u || seen[v] || !live(v)) continue;
        const bool edge = forward ? net.link_power(u, v) <= p[u]
                                  : net.link_power(v, u) <= p[v];
        if (edge) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    return queue.size() == members.size();
  };
  return sweep(true) && sweep(false);
}

}  // namespace

bool is_strongly_connected(const NetworkInstance& net, const PowerAssignment& p) {
  return strongly_connected_impl(net, p, nullptr);
}

bool is_strongly_connected_among(const NetworkInstance& net, const PowerAssignment& p,
                                 const std::vector<bool>& alive) {
  return strongly_connected_impl(net, p, &alive);
}

bool local_connectivity(const NetworkInstance& net, const PowerAssignment& p, NodeId i,
                        double a_i) {
  const std::vector<NodeId> targets = reachable_set(net, p, i);
  if (targets.empty()) return true;
  const PowerAssignment dev = p.with(i, a_i);
  // BFS from i in the deviated graph; every current reachable neighbor must
  // still be found.
  const int n = net.size();
  std::vector<char> seen(n, 0);
  std::vector<NodeId> queue{i};
  seen[i] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId v = 0; v < n; ++v) {
      if (v == u || seen[v]) continue;
      if (net.link_power(u, v) <= dev[u]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  for (NodeId t : targets) {
    if (!seen[t]) return false;
  }
  return true;
}

Deployment read_deployment(std::istream& in) {
  Deployment d;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("deployment: empty input");
  }
  std::size_t n = 0;
  {
    std::istringstream hs(line);
    std::string hash;
    hs >> hash >> d.side_m >> n >> d.seed;
    if (hash != "#" || !hs || d.side_m <= 0.0) {
      throw std::runtime_error("deployment: bad header, expected '# side_m n seed'");
    }
  }
  std::vector<bool> present(n, false);
  d.positions.resize(n);
  d.energies.resize(n);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long id = -1;
    double x = 0.0, y = 0.0, w = 0.0;
    ls >> id >> x >> y >> w;
    if (!ls) throw std::runtime_error("deployment: bad node line: " + line);
    if (id < 0 || static_cast<std::size_t>(id) >= n) {
      throw std::runtime_error("deployment: node id out of range: " + line);
    }
    if (present[id]) {
      throw std::runtime_error("deployment: duplicate node id " + std::to_string(id));
    }
    if (x < 0.0 || x > d.side_m || y < 0.0 || y > d.side_m) {
      throw std::runtime_error("deployment: position outside region: " + line);
    }
    present[id] = true;
    d.positions[id] = Position{x, y};
    d.energies[id] = w;
    ++count;
  }
  if (count != n) {
    throw std::runtime_error("deployment: expected " + std::to_string(n) + " nodes, got " +
                             std::to_string(count));
  }
  return d;
}

void write_deployment(const Deployment& d, std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# %.12g %zu %llu\n", d.side_m, d.positions.size(),
                static_cast<unsigned long long>(d.seed));
  out << buf;
  for (std::size_t i = 0; i < d.positions.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.12g %.12g %.12g\n", i, d.positions[i].x,
                  d.positions[i].y, d.energies[i]);
    out << buf;
  }
}

}  // namespace ctca

#include "netupd/workload.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

namespace netupd {

namespace {

// Minimal GraphML scan: node ids and edge endpoints; everything else in the
// markup is ignored.
std::string attr(const std::string& tag, const std::string& name) {
  auto pos = tag.find(name + "=\"");
  if (pos == std::string::npos) return "";
  pos += name.size() + 2;
  auto end = tag.find('"', pos);
  return tag.substr(pos, end - pos);
}

}  // namespace

Network ingest_topology(const std::string& graphml) {
  std::vector<std::string> nodes;
  std::set<std::string> node_set;
  std::set<std::pair<std::string, std::string>> undirected;

  size_t pos = 0;
  while ((pos = graphml.find('<', pos)) != std::string::npos) {
    size_t end = graphml.find('>', pos);
    if (end == std::string::npos) throw ParseError("unterminated tag", 0);
    std::string tag = graphml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.rfind("node", 0) == 0) {
      std::string id = attr(tag, "id");
      if (id.empty()) throw ParseError("node without id", 0);
      if (node_set.insert(id).second) nodes.push_back(id);
    } else if (tag.rfind("edge", 0) == 0) {
      std::string src = attr(tag, "source"), dst = attr(tag, "target");
      if (src.empty() || dst.empty()) throw ParseError("edge without endpoints", 0);
      if (src == dst) continue;  // self loops carry no routing information
      auto key = src < dst ? std::make_pair(src, dst) : std::make_pair(dst, src);
      undirected.insert(key);  // parallel links collapse
    }
  }
  if (nodes.empty()) throw SemanticError("topology has no nodes");

  std::set<std::string> touched;
  for (const auto& [u, v] : undirected) {
    touched.insert(u);
    touched.insert(v);
  }
  std::vector<std::string> kept;
  for (const std::string& n : nodes)
    if (touched.count(n)) kept.push_back(n);
  if (kept.empty()) throw SemanticError("topology has no edges");

  // Connectivity over the undirected skeleton.
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [u, v] : undirected) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::set<std::string> seen{kept.front()};
  std::deque<std::string> queue{kept.front()};
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (const auto& w : adj[v])
      if (seen.insert(w).second) queue.push_back(w);
  }
  if (seen.size() != kept.size()) throw SemanticError("graph disconnected");
  if (undirected.size() == kept.size() - 1) throw SemanticError("graph is a tree");

  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& [u, v] : undirected) {
    edges.emplace_back(u, v, 1.0);
    edges.emplace_back(v, u, 1.0);
  }
  return Network(kept, edges);
}

std::vector<int> segment_path(const Network& network, const std::vector<double>& weights, int s,
                              int t, int waypoint) {
  auto dijkstra = [&](int from, int to) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(network.node_count(), inf);
    std::vector<int> pred(network.node_count(), -1);
    std::vector<std::vector<std::pair<int, int>>> out(network.node_count());  // (head, edge)
    for (int e = 0; e < network.edge_count(); ++e)
      out[network.edge(e).first].emplace_back(network.edge(e).second, e);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[from] = 0.0;
    heap.push({0.0, from});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      if (v == to) break;
      for (auto [w, e] : out[v]) {
        double nd = d + weights[e];
        if (nd < dist[w]) {
          dist[w] = nd;
          pred[w] = v;
          heap.push({nd, w});
        }
      }
    }
    if (dist[to] == inf) throw SemanticError("no route between endpoints");
    std::vector<int> path;
    for (int v = to; v != -1; v = pred[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
  };

  std::vector<int> path;
  if (waypoint < 0) {
    path = dijkstra(s, t);
  } else {
    path = dijkstra(s, waypoint);
    auto second = dijkstra(waypoint, t);
    path.insert(path.end(), second.begin() + 1, second.end());
  }
  // Loop erasure: concatenation may revisit a node; keep the walk simple.
  std::vector<int> simple;
  std::unordered_map<int, size_t> position;
  for (int v : path) {
    auto it = position.find(v);
    if (it != position.end()) {
      while (simple.size() > it->second + 1) {
        position.erase(simple.back());
        simple.pop_back();
      }
      continue;
    }
    position[v] = simple.size();
    simple.push_back(v);
  }
  return simple;
}

namespace {

std::vector<double> draw_weights(const Network& network, const WorkloadConfig& config, Rng& rng) {
  std::vector<double> weights(network.edge_count());
  for (double& w : weights) w = rng.uniform(config.weight_min, config.weight_max);
  return weights;
}

GeneratedPair draw_pair(const Network& network, const WorkloadConfig& config,
                        const std::vector<double>& weights, Rng& rng) {
  GeneratedPair gp;
  int n = network.node_count();
  gp.source = rng.uniform_int(0, n - 1);
  do {
    gp.terminal = rng.uniform_int(0, n - 1);
  } while (gp.terminal == gp.source);

  std::vector<int> candidates;
  for (int v = 0; v < n; ++v)
    if (v != gp.source && v != gp.terminal) candidates.push_back(v);
  auto draw_waypoint = [&]() {
    return candidates.empty() ? -1 : candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
  };
  int w_old = draw_waypoint();
  int w_new = config.shared_waypoint ? w_old : draw_waypoint();
  gp.old_path = segment_path(network, weights, gp.source, gp.terminal, w_old);
  gp.new_path = segment_path(network, weights, gp.source, gp.terminal, w_new);
  return gp;
}

}  // namespace

std::vector<GeneratedPair> generate_pairs(const Network& network, const WorkloadConfig& config,
                                          Rng& rng) {
  std::vector<GeneratedPair> out;
  std::vector<double> weights;
  if (!config.per_pair_weights) weights = draw_weights(network, config, rng);
  for (int i = 0; i < config.pair_count; ++i) {
    if (config.per_pair_weights) weights = draw_weights(network, config, rng);
    out.push_back(draw_pair(network, config, weights, rng));
  }
  return out;
}

Network set_capacities(const Network& network, const std::vector<GeneratedPair>& baseline,
                       const WorkloadConfig& config, Rng& rng) {
  std::vector<double> load(network.edge_count(), 0.0);
  double min_demand = std::numeric_limits<double>::infinity();
  for (const GeneratedPair& gp : baseline) {
    double demand = rng.uniform(config.demand_min, config.demand_max);
    min_demand = std::min(min_demand, demand);
    for (const auto* path : {&gp.old_path, &gp.new_path})
      for (size_t i = 0; i + 1 < path->size(); ++i)
        load[network.edge_index((*path)[i], (*path)[i + 1])] += demand;
  }
  if (baseline.empty()) min_demand = config.demand_min;

  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (int e = 0; e < network.edge_count(); ++e) {
    auto [u, v] = network.edge(e);
    double cap = load[e] > 0.0 ? load[e] : min_demand;
    edges.emplace_back(network.node_name(u), network.node_name(v), cap);
  }
  return Network(network.node_names(), edges);
}

Instance grow_demands(const Network& network, const std::vector<GeneratedPair>& pairs,
                      const WorkloadConfig& config) {
  if (config.growth <= 1.0) throw std::invalid_argument("growth factor must exceed 1");
  Instance instance;
  instance.network = network;
  for (size_t i = 0; i < pairs.size(); ++i) {
    FlowPair fp;
    fp.id = static_cast<long>(i);
    fp.source = pairs[i].source;
    fp.terminal = pairs[i].terminal;
    fp.old_path = pairs[i].old_path;
    fp.new_path = pairs[i].new_path;
    fp.demand = 1.0;
    instance.pairs.push_back(std::move(fp));
  }

  std::vector<double> old_load(network.edge_count(), 0.0), new_load(network.edge_count(), 0.0);
  std::vector<std::vector<int>> old_edges(pairs.size()), new_edges(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (size_t j = 0; j + 1 < pairs[i].old_path.size(); ++j) {
      int e = network.edge_index(pairs[i].old_path[j], pairs[i].old_path[j + 1]);
      old_edges[i].push_back(e);
      old_load[e] += 1.0;
    }
    for (size_t j = 0; j + 1 < pairs[i].new_path.size(); ++j) {
      int e = network.edge_index(pairs[i].new_path[j], pairs[i].new_path[j + 1]);
      new_edges[i].push_back(e);
      new_load[e] += 1.0;
    }
  }

  std::vector<bool> frozen(pairs.size(), false);
  size_t active = pairs.size();
  while (active > 0) {
    for (size_t i = 0; i < pairs.size(); ++i) {
      if (frozen[i]) continue;
      double d = instance.pairs[i].demand;
      double grown = d * config.growth;
      double delta = grown - d;
      bool fits = true;
      for (int e : old_edges[i])
        if (old_load[e] + delta > network.capacity(e) + kLoadTolerance) fits = false;
      for (int e : new_edges[i])
        if (new_load[e] + delta > network.capacity(e) + kLoadTolerance) fits = false;
      if (!fits) {
        frozen[i] = true;
        --active;
        continue;
      }
      instance.pairs[i].demand = grown;
      for (int e : old_edges[i]) old_load[e] += delta;
      for (int e : new_edges[i]) new_load[e] += delta;
    }
  }
  return instance;
}

Instance generate_instance(const Network& topology, const WorkloadConfig& config) {
  Rng rng(config.seed);
  auto pairs = generate_pairs(topology, config, rng);
  // By default the pairs themselves serve as the baseline flows, so every
  // edge a flow touches gets capacity proportional to that usage; a separate
  // baseline draw is available via baseline_count.
  std::vector<GeneratedPair> baseline;
  if (config.baseline_count >= 0) {
    WorkloadConfig baseline_config = config;
    baseline_config.pair_count = config.baseline_count;
    baseline = generate_pairs(topology, baseline_config, rng);
  } else {
    baseline = pairs;
  }
  Network sized = set_capacities(topology, baseline, config, rng);
  return grow_demands(sized, pairs, config);
}

double old_flow_utilization(const Instance& instance) {
  const Network& net = instance.network;
  std::vector<double> load(net.edge_count(), 0.0);
  for (const FlowPair& fp : instance.pairs)
    for (size_t i = 0; i + 1 < fp.old_path.size(); ++i)
      load[net.edge_index(fp.old_path[i], fp.old_path[i + 1])] += fp.demand;
  double used = 0.0, cap = 0.0;
  for (int e = 0; e < net.edge_count(); ++e) {
    if (load[e] <= 0.0) continue;
    used += load[e];
    cap += net.capacity(e);
  }
  return cap > 0.0 ? used / cap : 0.0;
}

}  // namespace netupd

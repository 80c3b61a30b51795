#include "netupd/checker.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace netupd {

namespace {

// Reachable node set from `start` over the directed edge list (edge ids into
// the network). Works on cyclic graphs.
std::unordered_set<int> reachable_from(const Network& net, const std::vector<int>& edges,
                                       int start, bool forward) {
  std::unordered_map<int, std::vector<int>> adj;
  for (int e : edges) {
    auto [u, v] = net.edge(e);
    if (forward)
      adj[u].push_back(v);
    else
      adj[v].push_back(u);
  }
  std::unordered_set<int> seen{start};
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (int w : it->second)
      if (seen.insert(w).second) queue.push_back(w);
  }
  return seen;
}

}  // namespace

bool AugmentationReport::valid(double alpha, double beta, const Network& network) const {
  if (!loop_free) return false;
  for (const auto& [e, peak] : per_edge_peak)
    if (peak > alpha * network.capacity(e) + beta + kLoadTolerance) return false;
  return true;
}

Checker::Checker(const Instance& instance) : instance_(&instance), infos_(analyze_pairs(instance)) {}

bool Checker::updated_by(int pair, const UpdateSchedule& schedule, int node,
                         int global_round) const {
  int local = schedule.local_round_of(pair, node);
  if (local == 0) return false;
  return schedule.start_offset[pair] + local <= global_round;
}

std::vector<int> Checker::after_set(int pair, const UpdateSchedule& schedule, int round) const {
  const PairInfo& info = infos_[pair];
  const Network& net = instance_->network;
  std::vector<int> out;
  out.reserve(info.edges.size());
  for (int e : info.edges) {
    int tail = net.edge(e).first;
    bool shared = std::binary_search(info.shared_edges.begin(), info.shared_edges.end(), e);
    bool is_new = std::binary_search(info.new_only_edges.begin(), info.new_only_edges.end(), e);
    bool active = shared || (is_new ? updated_by(pair, schedule, tail, round)
                                    : !updated_by(pair, schedule, tail, round));
    if (active) out.push_back(e);
  }
  return out;
}

std::vector<int> Checker::during_set(int pair, const UpdateSchedule& schedule, int round) const {
  if (round <= 0) return after_set(pair, schedule, 0);
  const PairInfo& info = infos_[pair];
  const Network& net = instance_->network;
  std::vector<int> out;
  out.reserve(info.edges.size());
  for (int e : info.edges) {
    int tail = net.edge(e).first;
    bool shared = std::binary_search(info.shared_edges.begin(), info.shared_edges.end(), e);
    bool is_new = std::binary_search(info.new_only_edges.begin(), info.new_only_edges.end(), e);
    // Active during r := active after r-1 or after r. New-only edges only
    // gain activity, old-only edges only lose it.
    bool active = shared || (is_new ? updated_by(pair, schedule, tail, round)
                                    : !updated_by(pair, schedule, tail, round - 1));
    if (active) out.push_back(e);
  }
  return out;
}

TransientState Checker::transient_edges(int pair, const UpdateSchedule& schedule,
                                        int round) const {
  if (pair < 0 || pair >= static_cast<int>(infos_.size()))
    throw std::out_of_range("pair index out of range");
  if (round < 0 || round > std::max(schedule.horizon(), 0))
    throw std::out_of_range("round out of range");
  TransientState state;
  state.pair = pair;
  state.round = round;
  state.active_after = after_set(pair, schedule, round);
  state.active_during = during_set(pair, schedule, round);
  return state;
}

std::optional<std::vector<int>> Checker::find_cycle(int, const std::vector<int>& edges) const {
  const Network& net = instance_->network;
  std::unordered_map<int, std::vector<int>> adj;
  std::unordered_set<int> nodes;
  for (int e : edges) {
    auto [u, v] = net.edge(e);
    adj[u].push_back(v);
    nodes.insert(u);
    nodes.insert(v);
  }
  std::unordered_map<int, int> state;  // 0 unseen, 1 on stack, 2 done
  std::vector<int> stack;
  std::optional<std::vector<int>> cycle;

  auto dfs = [&](auto&& self, int v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    for (int w : adj[v]) {
      int s = state.count(w) ? state[w] : 0;
      if (s == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle = std::vector<int>(it, stack.end());
        return true;
      }
      if (s == 0 && self(self, w)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (int v : nodes) {
    if ((state.count(v) ? state[v] : 0) == 0 && dfs(dfs, v)) return cycle;
  }
  return std::nullopt;
}

std::optional<LoopWitness> Checker::check_loop_freedom(const UpdateSchedule& schedule) const {
  int horizon = schedule.horizon();
  for (int p = 0; p < static_cast<int>(infos_.size()); ++p) {
    for (int r = 1; r <= horizon; ++r) {
      auto cycle = find_cycle(p, during_set(p, schedule, r));
      if (cycle) {
        LoopWitness w;
        w.pair = p;
        w.round = r;
        w.cycle = *cycle;
        return w;
      }
    }
  }
  return std::nullopt;
}

std::vector<int> Checker::loaded_edges(int pair, const UpdateSchedule& schedule, int round) const {
  const FlowPair& fp = instance_->pairs[pair];
  const Network& net = instance_->network;
  std::vector<int> during = during_set(pair, schedule, round);
  auto reach = reachable_from(net, during, fp.source, /*forward=*/true);
  auto coreach = reachable_from(net, during, fp.terminal, /*forward=*/false);
  std::vector<int> out;
  for (int e : during) {
    auto [u, v] = net.edge(e);
    if (reach.count(u) && coreach.count(v)) out.push_back(e);
  }
  return out;
}

double Checker::worst_case_load(const UpdateSchedule& schedule, int round, int edge) const {
  double load = 0.0;
  for (int p = 0; p < static_cast<int>(infos_.size()); ++p) {
    if (find_cycle(p, during_set(p, schedule, round)))
      throw std::runtime_error("transient loop at round " + std::to_string(round) +
                               ": load undefined");
    for (int e : loaded_edges(p, schedule, round))
      if (e == edge) load += instance_->pairs[p].demand;
  }
  return load;
}

AugmentationReport Checker::assess(const UpdateSchedule& schedule) const {
  const Network& net = instance_->network;
  AugmentationReport report;
  int horizon = schedule.horizon();
  report.rounds_used = horizon;
  report.loop_witness = check_loop_freedom(schedule);
  report.loop_free = !report.loop_witness.has_value();

  std::unordered_map<int, double> peak;
  if (horizon == 0) {
    for (int p = 0; p < static_cast<int>(infos_.size()); ++p)
      for (int e : infos_[p].old_edges) peak[e] += instance_->pairs[p].demand;
  }
  for (int r = 1; r <= horizon; ++r) {
    std::unordered_map<int, double> load;
    for (int p = 0; p < static_cast<int>(infos_.size()); ++p)
      for (int e : loaded_edges(p, schedule, r)) load[e] += instance_->pairs[p].demand;
    for (const auto& [e, l] : load) {
      peak[e] = std::max(peak[e], l);
      if (l > net.capacity(e) + kLoadTolerance) report.violations.push_back({r, e, l});
    }
  }
  report.per_edge_peak.insert(peak.begin(), peak.end());

  double alpha = 1.0, beta = 0.0;
  for (const auto& [e, l] : report.per_edge_peak) {
    alpha = std::max(alpha, l / net.capacity(e));
    beta = std::max(beta, l - net.capacity(e));
  }
  report.alpha_min = alpha;
  report.beta_min = std::max(beta, 0.0);
  std::sort(report.violations.begin(), report.violations.end(),
            [](const RoundViolation& a, const RoundViolation& b) {
              return std::tie(a.round, a.edge) < std::tie(b.round, b.edge);
            });
  return report;
}

std::optional<ConnectivityWitness> Checker::check_connectivity(
    const UpdateSchedule& schedule) const {
  const Network& net = instance_->network;
  int horizon = schedule.horizon();
  for (int p = 0; p < static_cast<int>(infos_.size()); ++p) {
    const FlowPair& fp = instance_->pairs[p];
    for (int r = 0; r <= horizon; ++r) {
      std::vector<int> after = after_set(p, schedule, r);
      auto reach = reachable_from(net, after, fp.source, true);
      if (!reach.count(fp.terminal)) {
        // Witness: a reachable node with no active outgoing edge.
        ConnectivityWitness w;
        w.pair = p;
        w.round = r;
        w.node = fp.source;
        std::unordered_set<int> has_out;
        for (int e : after) has_out.insert(net.edge(e).first);
        for (int v : reach)
          if (!has_out.count(v) && v != fp.terminal) w.node = v;
        w.reason = "no source-terminal route after round " + std::to_string(r);
        return w;
      }
    }
    // An old-only node must not drop its rule while flow can still reach it.
    for (int u : infos_[p].old_only_nodes) {
      int local = schedule.local_round_of(p, u);
      if (local == 0) continue;
      int g = schedule.start_offset[p] + local;
      auto during = during_set(p, schedule, g);
      auto reach = reachable_from(net, during, fp.source, true);
      if (reach.count(u)) {
        ConnectivityWitness w;
        w.pair = p;
        w.round = g;
        w.node = u;
        w.reason = "old rule removed while node still receives flow";
        return w;
      }
    }
  }
  return std::nullopt;
}

std::string write_report(const Instance& instance, const AugmentationReport& report) {
  const Network& net = instance.network;
  std::ostringstream out;
  out << "report\n";
  out << "rounds " << report.rounds_used << "\n";
  out << "loop_free " << (report.loop_free ? "true" : "false") << "\n";
  out << "alpha_min " << format_number(report.alpha_min) << "\n";
  out << "beta_min " << format_number(report.beta_min) << "\n";
  for (const auto& [e, peak] : report.per_edge_peak) {
    auto [u, v] = net.edge(e);
    out << "edge " << net.node_name(u) << " " << net.node_name(v) << " peak "
        << format_number(peak) << "\n";
  }
  for (const RoundViolation& viol : report.violations) {
    auto [u, v] = net.edge(viol.edge);
    out << "violation round " << viol.round << " edge " << net.node_name(u) << " "
        << net.node_name(v) << " load " << format_number(viol.load) << " capacity "
        << format_number(net.capacity(viol.edge)) << "\n";
  }
  if (report.loop_witness) {
    out << "loop pair " << report.loop_witness->pair << " round " << report.loop_witness->round
        << " cycle";
    for (int v : report.loop_witness->cycle) out << " " << net.node_name(v);
    out << "\n";
  }
  return out.str();
}

std::optional<LoopWitness> check_loop_freedom(const Instance& instance,
                                              const UpdateSchedule& schedule) {
  return Checker(instance).check_loop_freedom(schedule);
}

AugmentationReport assess(const Instance& instance, const UpdateSchedule& schedule) {
  return Checker(instance).assess(schedule);
}

std::optional<ConnectivityWitness> check_connectivity(const Instance& instance,
                                                      const UpdateSchedule& schedule) {
  return Checker(instance).check_connectivity(schedule);
}

}  // namespace netupd

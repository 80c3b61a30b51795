#include "netupd/greedy.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace netupd {

namespace {

// True iff `target` is reachable from `start` over the active edge set.
bool reaches(const Network& net, const std::set<int>& active, int start, int target) {
  if (start == target) return true;
  std::unordered_map<int, std::vector<int>> adj;
  for (int e : active) {
    auto [u, v] = net.edge(e);
    adj[u].push_back(v);
  }
  std::unordered_set<int> seen{start};
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : adj[v]) {
      if (w == target) return true;
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  return false;
}

}  // namespace

std::vector<std::vector<int>> greedy_pair(const Network& network, const FlowPair& pair) {
  PairInfo info = analyze_pair(network, pair, 0);
  if (info.rule_changers.empty()) return {};

  std::set<int> active(info.old_edges.begin(), info.old_edges.end());
  // Not-yet-updated edges of the new flow, nearest the terminal first.
  std::vector<int> pending;
  for (auto it = info.new_edges.rbegin(); it != info.new_edges.rend(); ++it) {
    if (!std::binary_search(info.old_only_edges.begin(), info.old_only_edges.end(), *it) &&
        !std::binary_search(info.shared_edges.begin(), info.shared_edges.end(), *it))
      pending.push_back(*it);
  }

  std::map<int, int> round_of;  // node -> assigned round
  int max_round = 0;
  int round = 0;
  while (!pending.empty()) {
    ++round;
    std::vector<int> accepted;
    for (int e : pending) {
      auto [tail, head] = network.edge(e);
      if (reaches(network, active, head, tail)) continue;  // would close a cycle
      active.insert(e);
      accepted.push_back(e);
      round_of[tail] = round;
      max_round = std::max(max_round, round);
      // Removing the tail's old rule disconnects its old-only segment; the
      // whole segment updates next round.
      for (int u : info.old_only_nodes) {
        if (info.segment_head.at(u) == tail && !round_of.count(u)) {
          round_of[u] = round + 1;
          max_round = std::max(max_round, round + 1);
        }
      }
    }
    if (accepted.empty())
      throw std::logic_error("no admissible edge found; pair state is inconsistent");
    for (int e : accepted) pending.erase(std::find(pending.begin(), pending.end(), e));
    // Close the round: retire old-flow edges whose tail updated.
    for (auto it = active.begin(); it != active.end();) {
      bool old_only =
          std::binary_search(info.old_only_edges.begin(), info.old_only_edges.end(), *it);
      int tail = network.edge(*it).first;
      auto rit = round_of.find(tail);
      if (old_only && rit != round_of.end() && rit->second <= round)
        it = active.erase(it);
      else
        ++it;
    }
  }

  std::vector<std::vector<int>> rounds(max_round);
  for (const auto& [v, r] : round_of) rounds[r - 1].push_back(v);
  for (auto& set : rounds) std::sort(set.begin(), set.end());
  return rounds;
}

UpdateSchedule greedy_all(const Instance& instance) {
  UpdateSchedule schedule = UpdateSchedule::empty_for(instance);
  for (size_t p = 0; p < instance.pairs.size(); ++p)
    schedule.rounds[p] = greedy_pair(instance.network, instance.pairs[p]);
  schedule.normalize();
  return schedule;
}

}  // namespace netupd

#pragma once

#include <unordered_map>
#include <vector>

#include "netupd/netmodel.hpp"

namespace netupd {

/// Role a node plays inside one flow pair.
enum class NodeRole {
  kUntouched,   // not on either path
  kStatic,      // on a path but keeps the same forwarding rule (or terminal)
  kBranching,   // on both paths with different outgoing edges
  kOldOnly,     // only on the old path: rule is removed
  kNewOnly,     // only on the updated path: rule is installed
};

/// Precomputed per-pair topology: resolved edge ids, node roles, and the
/// in-both "head" feeding each exclusive segment. Requires a valid instance.
struct PairInfo {
  int pair = -1;
  std::vector<int> old_edges;   // in path order
  std::vector<int> new_edges;   // in path order
  std::vector<int> edges;       // sorted union
  std::vector<int> shared_edges;
  std::vector<int> old_only_edges;
  std::vector<int> new_only_edges;

  std::vector<int> nodes;  // sorted union of path nodes
  std::unordered_map<int, NodeRole> role;
  std::unordered_map<int, int> out_old;  // node -> edge id (tail rule), absent if none
  std::unordered_map<int, int> out_new;
  /// For old-only/new-only nodes: the nearest upstream node on the same path
  /// that lies on both paths. Always a branching node.
  std::unordered_map<int, int> segment_head;
  /// Immediate predecessor on the old path (for connectivity diagnostics).
  std::unordered_map<int, int> old_pred;

  /// Nodes whose forwarding rule changes; exactly the nodes a schedule must
  /// place. Sorted.
  std::vector<int> rule_changers;
  std::vector<int> branching_nodes;  // sorted
  std::vector<int> old_only_nodes;   // sorted
  std::vector<int> new_only_nodes;   // sorted

  bool is_rule_changer(int v) const;
};

/// Builds PairInfo for every pair. Throws SemanticError if the instance is
/// not valid (callers are expected to validate first).
std::vector<PairInfo> analyze_pairs(const Instance& instance);
PairInfo analyze_pair(const Network& network, const FlowPair& pair, int index);

}  // namespace netupd

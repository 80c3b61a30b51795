#include "netupd/pairinfo.hpp"

#include <algorithm>
#include <set>

namespace netupd {

bool PairInfo::is_rule_changer(int v) const {
  return std::binary_search(rule_changers.begin(), rule_changers.end(), v);
}

PairInfo analyze_pair(const Network& network, const FlowPair& pair, int index) {
  PairInfo info;
  info.pair = index;

  auto resolve = [&](const std::vector<int>& path, std::vector<int>& out) {
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      int e = network.edge_index(path[i], path[i + 1]);
      if (e < 0) throw SemanticError("path uses missing edge");
      out.push_back(e);
    }
  };
  resolve(pair.old_path, info.old_edges);
  resolve(pair.new_path, info.new_edges);

  std::set<int> old_set(info.old_edges.begin(), info.old_edges.end());
  std::set<int> new_set(info.new_edges.begin(), info.new_edges.end());
  std::set<int> all_edges = old_set;
  all_edges.insert(new_set.begin(), new_set.end());
  info.edges.assign(all_edges.begin(), all_edges.end());
  for (int e : info.edges) {
    bool o = old_set.count(e), n = new_set.count(e);
    if (o && n)
      info.shared_edges.push_back(e);
    else if (o)
      info.old_only_edges.push_back(e);
    else
      info.new_only_edges.push_back(e);
  }

  std::set<int> old_nodes(pair.old_path.begin(), pair.old_path.end());
  std::set<int> new_nodes(pair.new_path.begin(), pair.new_path.end());
  std::set<int> all_nodes = old_nodes;
  all_nodes.insert(new_nodes.begin(), new_nodes.end());
  info.nodes.assign(all_nodes.begin(), all_nodes.end());

  for (size_t i = 0; i + 1 < pair.old_path.size(); ++i) {
    info.out_old[pair.old_path[i]] = info.old_edges[i];
    info.old_pred[pair.old_path[i + 1]] = pair.old_path[i];
  }
  for (size_t i = 0; i + 1 < pair.new_path.size(); ++i)
    info.out_new[pair.new_path[i]] = info.new_edges[i];

  for (int v : info.nodes) {
    bool in_old = old_nodes.count(v), in_new = new_nodes.count(v);
    if (v == pair.terminal) {
      info.role[v] = NodeRole::kStatic;
    } else if (in_old && in_new) {
      int oe = info.out_old.at(v), ne = info.out_new.at(v);
      info.role[v] = (oe == ne) ? NodeRole::kStatic : NodeRole::kBranching;
    } else if (in_old) {
      info.role[v] = NodeRole::kOldOnly;
    } else {
      info.role[v] = NodeRole::kNewOnly;
    }
  }

  // Segment heads: nearest upstream node on the same path present on both.
  auto assign_heads = [&](const std::vector<int>& path, NodeRole exclusive) {
    int head = -1;
    for (int v : path) {
      if (info.role.at(v) == exclusive) {
        info.segment_head[v] = head;
      } else if (old_nodes.count(v) && new_nodes.count(v)) {
        head = v;
      }
    }
  };
  assign_heads(pair.old_path, NodeRole::kOldOnly);
  assign_heads(pair.new_path, NodeRole::kNewOnly);

  for (int v : info.nodes) {
    switch (info.role.at(v)) {
      case NodeRole::kBranching:
        info.branching_nodes.push_back(v);
        info.rule_changers.push_back(v);
        break;
      case NodeRole::kOldOnly:
        info.old_only_nodes.push_back(v);
        info.rule_changers.push_back(v);
        break;
      case NodeRole::kNewOnly:
        info.new_only_nodes.push_back(v);
        info.rule_changers.push_back(v);
        break;
      default:
        break;
    }
  }
  return info;
}

std::vector<PairInfo> analyze_pairs(const Instance& instance) {
  std::vector<PairInfo> out;
  out.reserve(instance.pairs.size());
  for (size_t p = 0; p < instance.pairs.size(); ++p)
    out.push_back(analyze_pair(instance.network, instance.pairs[p], static_cast<int>(p)));
  return out;
}

std::vector<std::string> validate_schedule(const Instance& instance,
                                           const UpdateSchedule& schedule) {
  std::vector<std::string> out;
  if (schedule.rounds.size() != instance.pairs.size() ||
      schedule.start_offset.size() != instance.pairs.size()) {
    out.push_back("schedule pair count does not match instance");
    return out;
  }
  auto infos = analyze_pairs(instance);
  for (size_t p = 0; p < instance.pairs.size(); ++p) {
    std::set<int> seen;
    std::string prefix = "pair " + std::to_string(instance.pairs[p].id) + ": ";
    if (schedule.start_offset[p] < 0) out.push_back(prefix + "negative start offset");
    for (const auto& round : schedule.rounds[p]) {
      for (int v : round) {
        if (!seen.insert(v).second)
          out.push_back(prefix + "node " + instance.network.node_name(v) +
                        " updates more than once");
        if (!infos[p].is_rule_changer(v))
          out.push_back(prefix + "node " + instance.network.node_name(v) +
                        " needs no rule change");
      }
    }
    for (int v : infos[p].rule_changers)
      if (!seen.count(v))
        out.push_back(prefix + "rule-changing node " + instance.network.node_name(v) +
                      " never updates");
  }
  return out;
}

}  // namespace netupd

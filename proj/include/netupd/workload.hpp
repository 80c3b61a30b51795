#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netupd/netmodel.hpp"
#include "netupd/rng.hpp"

namespace netupd {

struct WorkloadConfig {
  int pair_count = 250;
  double weight_min = 1.0, weight_max = 100.0;      // open interval
  double demand_min = 10.0, demand_max = 20.0;      // open interval (baseline flows)
  double growth = 1.1;
  std::uint64_t seed = 0;
  int baseline_count = -1;                          // -1: the pairs themselves
  bool per_pair_weights = false;                    // --weights per-pair
  bool shared_waypoint = false;                     // --waypoint-mode shared
};

/// Parses a GraphML topology into a directed network (each undirected edge
/// becomes two directed edges, capacity placeholder 1). Isolated nodes are
/// dropped; disconnected graphs and trees are rejected.
Network ingest_topology(const std::string& graphml);

/// Weighted shortest path s -> waypoint -> t (plain shortest path when
/// waypoint < 0), with loop erasure so the result is simple.
std::vector<int> segment_path(const Network& network, const std::vector<double>& weights, int s,
                              int t, int waypoint);

struct GeneratedPair {
  int source = -1, terminal = -1;
  std::vector<int> old_path, new_path;
};

/// k random (source, terminal, old path, new path) tuples via waypoint
/// routing over random edge weights.
std::vector<GeneratedPair> generate_pairs(const Network& network, const WorkloadConfig& config,
                                          Rng& rng);

/// Capacity of an edge := the summed demand of every baseline flow (old and
/// updated) crossing it; untouched edges get the smallest baseline demand.
Network set_capacities(const Network& network, const std::vector<GeneratedPair>& baseline,
                       const WorkloadConfig& config, Rng& rng);

/// Round-robin multiplicative demand growth from 1 by the growth factor,
/// freezing a pair when either its old or its updated flow would no longer
/// fit. The result is always a valid instance.
Instance grow_demands(const Network& network, const std::vector<GeneratedPair>& pairs,
                      const WorkloadConfig& config);

/// Full pipeline: weights, pairs, baseline flows, capacities, demand growth.
Instance generate_instance(const Network& topology, const WorkloadConfig& config);

/// Sum of old-flow loads over capacity across edges carrying any old flow.
double old_flow_utilization(const Instance& instance);

}  // namespace netupd

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netupd/netmodel.hpp"
#include "netupd/pairinfo.hpp"

namespace netupd {

/// Edge activity of one pair around one round. `active_after` follows the
/// post-round semantics; `active_during` is the union of the states after
/// round r-1 and after round r (the transient set used for loop and load
/// checks).
struct TransientState {
  int pair = -1;
  int round = 0;
  std::vector<int> active_after;   // sorted edge ids
  std::vector<int> active_during;  // sorted edge ids
};

struct LoopWitness {
  int pair = -1;
  int round = 0;
  std::vector<int> cycle;  // node indices along the transient cycle
};

struct ConnectivityWitness {
  int pair = -1;
  int round = 0;
  int node = -1;
  std::string reason;
};

struct RoundViolation {
  int round = 0;
  int edge = -1;
  double load = 0.0;
};

struct AugmentationReport {
  int rounds_used = 0;
  std::map<int, double> per_edge_peak;  // edge id -> worst transient load
  double alpha_min = 1.0;
  double beta_min = 0.0;
  bool loop_free = true;
  std::optional<LoopWitness> loop_witness;
  /// Rounds/edges whose transient load exceeds the base capacity.
  std::vector<RoundViolation> violations;

  bool valid(double alpha, double beta, const Network& network) const;
};

/// Caches per-pair topology for repeated schedule checks against one
/// instance. All query methods are const and safe to call concurrently.
class Checker {
 public:
  explicit Checker(const Instance& instance);

  const Instance& instance() const { return *instance_; }
  const std::vector<PairInfo>& pair_infos() const { return infos_; }

  /// round may be 0 (initial state) up to the schedule horizon.
  TransientState transient_edges(int pair, const UpdateSchedule& schedule, int round) const;

  /// nullopt when every pair/round transient digraph is acyclic; otherwise
  /// the first offending (pair, round, cycle).
  std::optional<LoopWitness> check_loop_freedom(const UpdateSchedule& schedule) const;

  /// Worst-case transient load on `edge` during `round`. A pair loads an
  /// edge iff the edge is active during the round and lies on some
  /// source-terminal route of the transient digraph. Throws if the round's
  /// transient state contains a cycle (load undefined under loops).
  double worst_case_load(const UpdateSchedule& schedule, int round, int edge) const;

  AugmentationReport assess(const UpdateSchedule& schedule) const;

  /// Verifies that every post-round state keeps an s->t route per pair and
  /// that no old-only node drops its rule while transiently reachable.
  std::optional<ConnectivityWitness> check_connectivity(const UpdateSchedule& schedule) const;

 private:
  friend class LoadAccumulator;
  bool updated_by(int pair, const UpdateSchedule& schedule, int node, int global_round) const;
  std::vector<int> during_set(int pair, const UpdateSchedule& schedule, int round) const;
  std::vector<int> after_set(int pair, const UpdateSchedule& schedule, int round) const;
  /// Edges of `pair` carrying flow during `round` (reachability-filtered).
  std::vector<int> loaded_edges(int pair, const UpdateSchedule& schedule, int round) const;
  std::optional<std::vector<int>> find_cycle(int pair, const std::vector<int>& edges) const;

  const Instance* instance_;
  std::vector<PairInfo> infos_;
};

/// Report document (consumed by the CLI CSV emitter).
std::string write_report(const Instance& instance, const AugmentationReport& report);

// Free-function forms of the checker operations.
std::optional<LoopWitness> check_loop_freedom(const Instance& instance,
                                              const UpdateSchedule& schedule);
AugmentationReport assess(const Instance& instance, const UpdateSchedule& schedule);
std::optional<ConnectivityWitness> check_connectivity(const Instance& instance,
                                                      const UpdateSchedule& schedule);

}  // namespace netupd

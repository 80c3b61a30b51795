#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netupd {

/// Error thrown when a document cannot be tokenized/structured at all.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line)
      : std::runtime_error("parse error at line " + std::to_string(line) + ": " + msg),
        line(line) {}
  int line;
};

/// Error thrown when a document parses but violates a model invariant.
struct SemanticError : std::runtime_error {
  explicit SemanticError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Directed capacitated graph. Nodes are opaque strings externally; all
/// internal computation uses dense indices into `nodes`. Construction
/// canonicalizes: nodes sorted lexicographically, edges sorted by
/// (tail, head) index.
class Network {
 public:
  Network() = default;
  /// `edges` as (tail-name, head-name, capacity). Unknown endpoints throw
  /// SemanticError; duplicate edges throw SemanticError.
  Network(std::vector<std::string> node_names,
          const std::vector<std::tuple<std::string, std::string, double>>& edge_list);

  int node_count() const { return static_cast<int>(names_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& node_names() const { return names_; }
  const std::string& node_name(int v) const { return names_[v]; }
  int node_index(const std::string& name) const;  // -1 when absent
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::pair<int, int> edge(int e) const { return edges_[e]; }
  int edge_index(int tail, int head) const;  // -1 when absent
  double capacity(int e) const { return capacity_[e]; }
  const std::vector<double>& capacities() const { return capacity_; }
  double cmax() const;

 private:
  std::vector<std::string> names_;                 // sorted
  std::vector<std::pair<int, int>> edges_;         // sorted by (tail, head)
  std::vector<double> capacity_;
  std::map<std::string, int> name_to_index_;
  std::map<std::pair<int, int>, int> edge_to_index_;
};

/// One unsplittable demand with an old and an updated route. Paths are node
/// index sequences from source to terminal.
struct FlowPair {
  long id = 0;
  int source = -1;
  int terminal = -1;
  std::vector<int> old_path;
  std::vector<int> new_path;
  double demand = 0.0;
};

struct Instance {
  Network network;
  std::vector<FlowPair> pairs;
};

/// Absolute tolerance for all load/capacity comparisons.
inline constexpr double kLoadTolerance = 1e-9;

/// Checks every Network/FlowPair/Instance invariant and returns the list of
/// violations (empty iff the instance is well formed). Violations are data,
/// not failures.
std::vector<std::string> validate_instance(const Instance& instance);

/// Parses the instance interchange document. Throws ParseError on malformed
/// text and SemanticError when the parsed instance fails validate_instance.
Instance read_instance(const std::string& document);

/// Canonical serialization: sorted nodes, edges, pairs; shortest round-trip
/// number formatting. Identical instances serialize byte-identically.
std::string write_instance(const Instance& instance);

/// Per-flow-pair update rounds. rounds[p] is the pair's local round list
/// (1-based when addressed); each entry is a sorted set of node indices.
/// start_offset[p] shifts the pair's rounds globally. Trailing empty rounds
/// are trimmed on normalize().
struct UpdateSchedule {
  std::vector<std::vector<std::vector<int>>> rounds;
  std::vector<int> start_offset;

  static UpdateSchedule empty_for(const Instance& instance);
  int pair_rounds(int p) const { return static_cast<int>(rounds[p].size()); }
  int horizon() const;
  /// Sorts round sets, trims trailing empty rounds.
  void normalize();
  /// Local round (1-based) in which `node` updates for pair p, or 0.
  int local_round_of(int p, int node) const;
};

/// Schedule document round-trip (used by the CLI and the exact oracle's
/// witness output).
std::string write_schedule(const Instance& instance, const UpdateSchedule& schedule);
UpdateSchedule read_schedule(const Instance& instance, const std::string& document);

/// Schedule well-formedness against an instance: disjoint update sets whose
/// union is exactly the pair's rule-changing nodes. Returns violations.
std::vector<std::string> validate_schedule(const Instance& instance,
                                           const UpdateSchedule& schedule);

/// Shortest round-trip formatting for reals (canonical across the toolkit).
std::string format_number(double x);

}  // namespace netupd

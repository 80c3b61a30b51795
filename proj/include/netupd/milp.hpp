#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "netupd/netmodel.hpp"

namespace netupd {

enum class MilpObjective { kMinRounds, kMinAlpha, kMinBeta };

struct MilpParams {
  MilpObjective objective = MilpObjective::kMinRounds;
  /// Fixed round count (alpha/beta objectives) or the horizon R_max (rounds
  /// objective). 0 selects the default horizon k*(n-1).
  int rounds = 0;
  double alpha = 1.0;  // fixed multiplicative augmentation (rounds/beta modes)
  double beta = 0.0;   // fixed additive augmentation (rounds/alpha modes)
  /// Optional tightening: declare flow variables binary instead of [0,1].
  bool binary_flows = false;
};

enum class VarKind { kBinary, kInteger, kContinuous };

struct MilpVar {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lb = 0.0;
  double ub = 1.0;
};

struct MilpTerm {
  int var = -1;
  double coef = 0.0;
};

struct MilpConstraint {
  std::string name;   // tag + quantifier indices; unique
  std::vector<MilpTerm> terms;
  char sense = '<';   // '<' (<=), '>' (>=), '='
  double rhs = 0.0;
};

class MilpModel {
 public:
  int add_var(const std::string& name, VarKind kind, double lb, double ub);
  void add_constraint(MilpConstraint constraint);
  int var_index(const std::string& name) const;  // -1 when absent

  const std::vector<MilpVar>& vars() const { return vars_; }
  const std::vector<MilpConstraint>& constraints() const { return constraints_; }
  std::vector<MilpTerm>& objective() { return objective_; }
  const std::vector<MilpTerm>& objective_terms() const { return objective_; }

  MilpParams params;
  int horizon = 0;

  /// Decode grid: node-update variable -> (round, node, pair index).
  struct XVar {
    int var, round, node, pair;
  };
  std::vector<XVar> x_vars;

 private:
  std::vector<MilpVar> vars_;
  std::vector<MilpConstraint> constraints_;
  std::vector<MilpTerm> objective_;
  std::unordered_map<std::string, int> name_to_var_;
};

struct MilpSolution {
  enum class Status { kOptimal, kInfeasible, kTimeout, kError };
  Status status = Status::kError;
  double objective = 0.0;
  std::unordered_map<std::string, double> values;
  std::string detail;
};

/// Builds the round-indexed model for the instance: node-update, branching,
/// merging, ordering, edge-activity, edge-transitivity and edge-flow
/// variables with the full constraint family and the selected objective.
MilpModel encode(const Instance& instance, const MilpParams& params);

/// Deterministic text in the LP file dialect (objective / subject-to /
/// bounds / generals / binaries). Variable names encode (symbol, round,
/// node-or-edge, pair) via dense indices; a comment header carries the
/// index maps.
std::string export_lp(const MilpModel& model);

/// Reads the node-update variables of a feasible solution back into a
/// schedule (non-rule-changing updates are dropped). Throws on non-integral
/// binaries beyond 1e-6 or on a non-optimal solution.
UpdateSchedule decode(const Instance& instance, const MilpModel& model,
                      const MilpSolution& solution);

/// Runs `solver_command` on the exported model ({lp}/{sol}/{timelimit}
/// placeholders, appended as arguments when absent) and parses the solution
/// file ("var value" lines plus an optional status line).
MilpSolution solve_external(const std::string& lp_text, const std::string& solver_command,
                            double time_limit_s = 0.0);

/// Closed-form constraint count (asserted against every encoded model).
long expected_constraint_count(const Instance& instance, const MilpParams& params);

}  // namespace netupd

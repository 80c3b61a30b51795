#pragma once

#include <array>
#include <string>
#include <vector>

#include "netupd/netmodel.hpp"

namespace netupd {

/// 3-CNF formula. Literals are signed 1-based variable ids. Clauses holding
/// a variable and its negation are dropped at construction (they are always
/// satisfied).
struct Cnf3 {
  int variable_count = 0;
  std::vector<std::array<int, 3>> clauses;

  static Cnf3 from_clauses(int variable_count, std::vector<std::array<int, 3>> clauses);
  /// DIMACS text: "p cnf <vars> <clauses>" header, clauses terminated by 0.
  static Cnf3 parse_dimacs(const std::string& document);

  bool satisfies(const std::vector<bool>& assignment, int clause) const;
  bool satisfies(const std::vector<bool>& assignment) const;
};

struct GadgetParams {
  double epsilon = 0.25;
  bool additive = false;
  int sqrt_a = 3;
  long a = 9;  // sqrt_a squared; 0 for the additive variant

  static GadgetParams multiplicative(double epsilon);  // 0 < epsilon < 1/3
  static GadgetParams additive_variant(double epsilon);  // 0 < epsilon < 1
};

/// A reduction instance plus the role bindings needed to move between
/// schedules and assignments. Node names themselves encode their role
/// (w1_x3, w_x3_k2, u_c1, u_c1_s0, ...).
struct GadgetInstance {
  Instance instance;
  GadgetParams params;
  Cnf3 cnf;

  int true_pair = -1;   // per-variable truth flows (one pair each, see below)
  int false_pair = -1;
  std::vector<int> ladder_pairs;        // F(0..sqrt_a); back() is the blocking flow
  std::array<int, 3> clause_flow_pairs{-1, -1, -1};
  int blocking_pair = -1;

  /// Validity level the reduction targets: (x(2-eps)) or (+(Cmax/3 - eps)).
  double target_alpha() const;
  double target_beta() const;
  /// Canonical proof-schedule length: sqrt_a + 5 (multiplicative), 5 (additive).
  int proof_rounds() const { return params.sqrt_a + 5; }
};

GadgetInstance build_multiplicative(const Cnf3& cnf, double epsilon);
GadgetInstance build_additive(const Cnf3& cnf, double epsilon);

/// The proof-order schedule for a satisfying assignment: truth flows by the
/// assignment, one clause flow per clause, blocking flow, the ladder cascade
/// one flow per round, then the two completion rounds. Throws SemanticError
/// (naming the clause) when the assignment does not satisfy the formula.
UpdateSchedule schedule_from_assignment(const GadgetInstance& gadget,
                                        const std::vector<bool>& assignment);

/// Reads, per variable, which truth flow switched before the blocking flow
/// and returns the induced satisfying assignment. The schedule must be valid
/// at the gadget's target augmentation.
std::vector<bool> assignment_from_schedule(const GadgetInstance& gadget,
                                           const UpdateSchedule& schedule);

/// Role-map sidecar document (pair roles and variable/clause bindings).
std::string write_role_map(const GadgetInstance& gadget);

}  // namespace netupd

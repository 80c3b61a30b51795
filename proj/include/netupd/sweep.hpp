#pragma once

#include <string>
#include <vector>

#include "netupd/delay.hpp"
#include "netupd/exact.hpp"
#include "netupd/netmodel.hpp"

namespace netupd {

struct SweepSpec {
  double alpha_lo = 1.0, alpha_hi = 2.0, alpha_step = 0.05;
  std::vector<std::string> algorithms = {"greedy", "delay", "exact"};
  int delay_threshold = 3;
  SearchBudget budget;
  std::string solver_cmd;  // used by the "milp" algorithm
  int milp_horizon = 0;    // 0: k*(n-1)
  double time_limit_s = 0.0;
  int jobs = 1;
};

struct SweepInput {
  std::string topology;
  std::uint64_t seed = 0;
  Instance instance;
};

struct SweepRow {
  std::string topology;
  std::uint64_t seed = 0;
  std::string algorithm;
  double alpha = 1.0;
  int rounds = -1;          // -1 when not applicable/infeasible
  double alpha_min = 0.0;   // achieved augmentation (heuristics)
  double beta_min = 0.0;
  bool feasible = false;
  std::string status;       // ok | infeasible | budget | timeout | error
  double wall_time_s = 0.0;
};

std::vector<SweepRow> run_sweep(const std::vector<SweepInput>& inputs, const SweepSpec& spec);

/// Deterministic CSV (sorted rows, aggregate block appended, no timing).
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Wall-clock sidecar, same row order as sweep_csv.
std::string sweep_timing_csv(const std::vector<SweepRow>& rows);

std::vector<double> alpha_grid(const SweepSpec& spec);

}  // namespace netupd

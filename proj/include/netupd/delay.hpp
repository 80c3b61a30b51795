#pragma once

#include <map>

#include "netupd/checker.hpp"
#include "netupd/netmodel.hpp"

namespace netupd {

struct DelayConfig {
  /// Maximum cumulative extra rounds any single pair may be shifted.
  int threshold = 3;
  /// Which augmentation the greedy step reduces; the other breaks ties.
  enum class Objective { kMultiplicative, kAdditive } objective = Objective::kMultiplicative;
};

/// Sets per-pair start offsets; internal round structure is untouched.
UpdateSchedule apply_offsets(const UpdateSchedule& schedule, const std::map<int, int>& offsets);

/// Phase-wise post-processing: each phase shifts the one (pair, delay) whose
/// application most decreases the augmentation, until no move strictly helps.
/// The horizon grows by at most config.threshold.
UpdateSchedule delay_optimize(const Instance& instance, const UpdateSchedule& schedule,
                              const DelayConfig& config);

}  // namespace netupd

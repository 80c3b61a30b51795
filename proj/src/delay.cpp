#include "netupd/delay.hpp"

#include <stdexcept>

namespace netupd {

UpdateSchedule apply_offsets(const UpdateSchedule& schedule, const std::map<int, int>& offsets) {
  UpdateSchedule out = schedule;
  for (const auto& [pair, offset] : offsets) {
    if (pair < 0 || pair >= static_cast<int>(out.start_offset.size()))
      throw std::out_of_range("offset for unknown pair index");
    if (offset < 0) throw std::invalid_argument("offsets must be non-negative");
    out.start_offset[pair] = offset;
  }
  return out;
}

UpdateSchedule delay_optimize(const Instance& instance, const UpdateSchedule& schedule,
                              const DelayConfig& config) {
  Checker checker(instance);
  UpdateSchedule current = schedule;
  std::vector<int> used(instance.pairs.size(), 0);
  AugmentationReport base = checker.assess(current);
  const bool mult = config.objective == DelayConfig::Objective::kMultiplicative;

  while (true) {
    int best_pair = -1, best_delay = 0;
    double best_primary = kLoadTolerance, best_secondary = -1e300;
    AugmentationReport best_report;
    for (int p = 0; p < static_cast<int>(instance.pairs.size()); ++p) {
      for (int d = 1; d + used[p] <= config.threshold; ++d) {
        UpdateSchedule candidate = current;
        candidate.start_offset[p] += d;
        AugmentationReport report = checker.assess(candidate);
        double primary = mult ? base.alpha_min - report.alpha_min
                              : base.beta_min - report.beta_min;
        double secondary = mult ? base.beta_min - report.beta_min
                                : base.alpha_min - report.alpha_min;
        if (primary > best_primary + kLoadTolerance ||
            (primary > best_primary - kLoadTolerance &&
             secondary > best_secondary + kLoadTolerance)) {
          best_pair = p;
          best_delay = d;
          best_primary = primary;
          best_secondary = secondary;
          best_report = report;
        }
      }
    }
    if (best_pair < 0) break;
    current.start_offset[best_pair] += best_delay;
    used[best_pair] += best_delay;
    base = best_report;
  }
  return current;
}

}  // namespace netupd

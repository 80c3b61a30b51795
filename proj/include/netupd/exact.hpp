#pragma once

#include <chrono>
#include <map>
#include <optional>

#include "netupd/checker.hpp"
#include "netupd/netmodel.hpp"

namespace netupd {

struct SearchBudget {
  int max_nodes_per_pair = 10;  // rule-changing nodes per pair
  int max_pairs = 3;
  int max_horizon = 8;
  std::chrono::duration<double> timeout = std::chrono::seconds(120);
};

/// Thrown when an exhaustive operation hits the search budget (distinct from
/// a proven-infeasible outcome).
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

enum class SearchStatus { kFeasible, kInfeasible, kBudgetExceeded };

struct RoundsResult {
  SearchStatus status = SearchStatus::kInfeasible;
  int rounds = -1;
  UpdateSchedule witness;
};

struct AlphaResult {
  SearchStatus status = SearchStatus::kInfeasible;
  double alpha = 0.0;
  UpdateSchedule witness;
};

struct BetaResult {
  SearchStatus status = SearchStatus::kInfeasible;
  double beta = 0.0;
  UpdateSchedule witness;
};

/// Smallest R admitting an (alpha, beta)-valid loop-free R-round schedule
/// (per-pair delays included), by iterative-deepening exhaustive search.
RoundsResult optimal_rounds(const Instance& instance, double alpha, double beta,
                            const SearchBudget& budget);

/// Minimum over all loop-free R-round schedules of assess(...).alpha_min.
AlphaResult optimal_alpha(const Instance& instance, int rounds, const SearchBudget& budget);

/// Additive counterpart of optimal_alpha.
BetaResult optimal_beta(const Instance& instance, int rounds, const SearchBudget& budget);

/// Maximum per-edge load over every interleaving prefix of the round's
/// update events, tracing instantaneous forwarding states. At most 8 events
/// may update in the round (throws BudgetExceeded otherwise).
std::map<int, double> interleaving_oracle(const Instance& instance,
                                          const UpdateSchedule& schedule, int round);

}  // namespace netupd

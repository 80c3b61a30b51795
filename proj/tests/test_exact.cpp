#include <doctest.h>

#include "netupd/exact.hpp"
#include "netupd/greedy.hpp"
#include "netupd/rng.hpp"
#include "testutil.hpp"

using namespace netupd;
using namespace netupd::testutil;

namespace {

SearchBudget small_budget() {
  SearchBudget b;
  b.max_pairs = 6;
  b.max_nodes_per_pair = 12;
  b.max_horizon = 8;
  b.timeout = std::chrono::seconds(60);
  return b;
}

}  // namespace

TEST_CASE("delay example needs three rounds without augmentation") {
  Instance instance = delay_example_instance();
  RoundsResult result = optimal_rounds(instance, 1.0, 0.0, small_budget());
  REQUIRE(result.status == SearchStatus::kFeasible);
  CHECK(result.rounds == 3);
  AugmentationReport report = assess(instance, result.witness);
  CHECK(report.loop_free);
  CHECK(report.alpha_min <= 1.0 + kLoadTolerance);
}

TEST_CASE("delay example under factor-2 augmentation finishes in two rounds") {
  Instance instance = delay_example_instance();
  RoundsResult result = optimal_rounds(instance, 2.0, 0.0, small_budget());
  REQUIRE(result.status == SearchStatus::kFeasible);
  CHECK(result.rounds == 2);
}

TEST_CASE("trivial instances need zero rounds") {
  Instance instance = make_instance({"s", "t"}, {{"s", "t", 1}},
                                    {{0, "s", "t", 1, {"s", "t"}, {"s", "t"}}});
  RoundsResult result = optimal_rounds(instance, 1.0, 0.0, small_budget());
  REQUIRE(result.status == SearchStatus::kFeasible);
  CHECK(result.rounds == 0);
}

TEST_CASE("optimal alpha on the delay example: two rounds cost 2, three rounds cost 1") {
  Instance instance = delay_example_instance();
  AlphaResult two = optimal_alpha(instance, 2, small_budget());
  REQUIRE(two.status == SearchStatus::kFeasible);
  CHECK(two.alpha == doctest::Approx(2.0));
  AlphaResult three = optimal_alpha(instance, 3, small_budget());
  REQUIRE(three.status == SearchStatus::kFeasible);
  CHECK(three.alpha == doctest::Approx(1.0));
  AugmentationReport report = assess(instance, three.witness);
  CHECK(report.alpha_min == doctest::Approx(three.alpha));
}

TEST_CASE("optimal beta mirrors the additive view") {
  Instance instance = delay_example_instance();
  BetaResult two = optimal_beta(instance, 2, small_budget());
  REQUIRE(two.status == SearchStatus::kFeasible);
  CHECK(two.beta == doctest::Approx(1.0));
  BetaResult three = optimal_beta(instance, 3, small_budget());
  REQUIRE(three.status == SearchStatus::kFeasible);
  CHECK(three.beta == doctest::Approx(0.0));
}

TEST_CASE("factor-2 feasibility within greedy's round count") {
  Rng rng(606060);
  for (int i = 0; i < 40; ++i) {
    Instance instance = random_instance(rng, 8, 3);
    UpdateSchedule greedy = greedy_all(instance);
    SearchBudget budget = small_budget();
    budget.max_horizon = std::max(greedy.horizon(), 1);
    RoundsResult result = optimal_rounds(instance, 2.0, 0.0, budget);
    if (result.status == SearchStatus::kBudgetExceeded) continue;
    REQUIRE(result.status == SearchStatus::kFeasible);
    CHECK(result.rounds <= greedy.horizon());
  }
}

TEST_CASE("single pairs reach alpha 1 at greedy's round count") {
  Rng rng(123321);
  for (int i = 0; i < 40; ++i) {
    Instance instance = random_instance(rng, 8, 1);
    UpdateSchedule greedy = greedy_all(instance);
    AlphaResult result = optimal_alpha(instance, greedy.horizon(), small_budget());
    if (result.status == SearchStatus::kBudgetExceeded) continue;
    REQUIRE(result.status == SearchStatus::kFeasible);
    CHECK(result.alpha == doctest::Approx(1.0));
  }
}

TEST_CASE("monotonicity in the augmentation and round budget") {
  Rng rng(515151);
  int usable = 0;
  for (int i = 0; i < 30 || usable < 12; ++i) {
    if (i > 200) break;
    Instance instance = random_instance(rng, 8, 2, /*force_nontrivial=*/true);
    auto r10 = optimal_rounds(instance, 1.0, 0.0, small_budget());
    auto r12 = optimal_rounds(instance, 1.2, 0.0, small_budget());
    auto r20 = optimal_rounds(instance, 2.0, 0.0, small_budget());
    if (r10.status == SearchStatus::kBudgetExceeded ||
        r12.status == SearchStatus::kBudgetExceeded)
      continue;
    ++usable;
    REQUIRE(r20.status == SearchStatus::kFeasible);
    if (r10.status == SearchStatus::kFeasible) {
      REQUIRE(r12.status == SearchStatus::kFeasible);
      CHECK(r12.rounds <= r10.rounds);
      CHECK(r20.rounds <= r12.rounds);
    }
    AlphaResult a3 = optimal_alpha(instance, 3, small_budget());
    AlphaResult a4 = optimal_alpha(instance, 4, small_budget());
    if (a3.status == SearchStatus::kFeasible && a4.status == SearchStatus::kFeasible)
      CHECK(a4.alpha <= a3.alpha + kLoadTolerance);
  }
  CHECK(usable >= 12);
}

TEST_CASE("alpha results never exceed the universal factor-2 bound") {
  Rng rng(717171);
  for (int i = 0; i < 25; ++i) {
    Instance instance = random_instance(rng, 7, 2);
    UpdateSchedule greedy = greedy_all(instance);
    AlphaResult result = optimal_alpha(instance, std::max(1, greedy.horizon()), small_budget());
    if (result.status != SearchStatus::kFeasible) continue;
    CHECK(result.alpha <= 2.0 + kLoadTolerance);
  }
}

TEST_CASE("budget exhaustion is reported distinctly") {
  Instance instance = delay_example_instance();
  SearchBudget budget = small_budget();
  budget.max_pairs = 1;
  CHECK(optimal_rounds(instance, 1.0, 0.0, budget).status == SearchStatus::kBudgetExceeded);
}

TEST_CASE("interleaving oracle on a single-node round") {
  Instance instance = make_instance(
      {"s", "a", "b", "t"},
      {{"s", "a", 1}, {"a", "t", 1}, {"s", "b", 1}, {"b", "t", 1}},
      {{0, "s", "t", 1, {"s", "a", "t"}, {"s", "b", "t"}}});
  UpdateSchedule schedule = greedy_all(instance);
  // Round 2 only removes the stale node a: loads equal the committed route.
  auto loads = interleaving_oracle(instance, schedule, 2);
  int sb = instance.network.edge_index(instance.network.node_index("s"),
                                       instance.network.node_index("b"));
  CHECK(loads.at(sb) == doctest::Approx(1.0));
  int sa = instance.network.edge_index(instance.network.node_index("s"),
                                       instance.network.node_index("a"));
  CHECK(loads.count(sa) == 0);
}

TEST_CASE("interleaving oracle sees the delay-example congestion") {
  Instance instance = delay_example_instance();
  UpdateSchedule schedule = greedy_all(instance);
  auto loads = interleaving_oracle(instance, schedule, 1);
  int sa = instance.network.edge_index(instance.network.node_index("s"),
                                       instance.network.node_index("a"));
  int at = instance.network.edge_index(instance.network.node_index("a"),
                                       instance.network.node_index("t"));
  CHECK(loads.at(sa) == doctest::Approx(2.0));
  CHECK(loads.at(at) == doctest::Approx(2.0));
}

TEST_CASE("interleaving oracle refuses oversized rounds") {
  Rng rng(11);
  Instance instance = random_instance(rng, 12, 4);
  UpdateSchedule schedule = UpdateSchedule::empty_for(instance);
  auto infos = analyze_pairs(instance);
  int total = 0;
  for (size_t p = 0; p < instance.pairs.size(); ++p) {
    schedule.rounds[p] = {infos[p].rule_changers};
    total += static_cast<int>(infos[p].rule_changers.size());
  }
  schedule.normalize();
  if (total > 8) CHECK_THROWS_AS(interleaving_oracle(instance, schedule, 1), BudgetExceeded);
}

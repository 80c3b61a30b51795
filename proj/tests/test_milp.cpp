#include <doctest.h>

#include <cmath>

#include "netupd/exact.hpp"
#include "netupd/greedy.hpp"
#include "netupd/milp.hpp"
#include "netupd/rng.hpp"
#include "testutil.hpp"

using namespace netupd;
using namespace netupd::testutil;

namespace {

Instance diamond() {
  return make_instance(
      {"s", "a", "b", "t"},
      {{"s", "a", 1}, {"a", "t", 1}, {"s", "b", 1}, {"b", "t", 1}},
      {{0, "s", "t", 1, {"s", "a", "t"}, {"s", "b", "t"}}});
}

MilpParams min_rounds(double alpha, int horizon) {
  MilpParams params;
  params.objective = MilpObjective::kMinRounds;
  params.alpha = alpha;
  params.rounds = horizon;
  return params;
}

}  // namespace

TEST_CASE("variable grid sizes on the diamond pair") {
  MilpModel model = encode(diamond(), min_rounds(2.0, 2));
  int x = 0, y = 0, f = 0, g = 0, o = 0;
  for (const MilpVar& v : model.vars()) {
    if (v.name.rfind("x_", 0) == 0) ++x;
    if (v.name.rfind("y_", 0) == 0) ++y;
    if (v.name.rfind("f_", 0) == 0) ++f;
    if (v.name.rfind("g_", 0) == 0) ++g;
    if (v.name.rfind("o_", 0) == 0) ++o;
  }
  CHECK(x == 6);   // 2 rounds x {s, a, b}
  CHECK(y == 12);  // 4 edges x rounds {0, 1, 2}
  CHECK(f == 8);
  CHECK(g == 8);
  CHECK(o == 8);
}

TEST_CASE("constraint count matches the closed form") {
  Rng rng(321);
  for (int i = 0; i < 30; ++i) {
    Instance instance = random_instance(rng, 7, 3);
    for (auto objective : {MilpObjective::kMinRounds, MilpObjective::kMinAlpha}) {
      MilpParams params;
      params.objective = objective;
      params.rounds = 3;
      params.alpha = objective == MilpObjective::kMinRounds ? 2.0 : 1.0;
      MilpModel model = encode(instance, params);
      CHECK(static_cast<long>(model.constraints().size()) ==
            expected_constraint_count(instance, params));
    }
  }
}

TEST_CASE("identical-path pairs keep their edges pinned active") {
  Instance instance = make_instance(
      {"s", "m", "t"}, {{"s", "m", 1}, {"m", "t", 1}},
      {{0, "s", "t", 1, {"s", "m", "t"}, {"s", "m", "t"}}});
  MilpModel model = encode(instance, min_rounds(1.0, 2));
  int pinned = 0;
  for (const MilpConstraint& c : model.constraints())
    if (c.name.rfind("remain_active", 0) == 0) {
      CHECK(c.sense == '=');
      CHECK(c.rhs == 1.0);
      ++pinned;
    }
  CHECK(pinned == 4);  // two shared edges, two rounds
}

TEST_CASE("ordering constraint instantiates with the n-1 denominator") {
  // gamma <= (o_w - o_v - 1)/(n-1) + 1 linearizes to
  // (n-1) gamma - o_w + o_v <= n-2; with six network nodes: 5 gamma - o_w + o_v <= 4.
  Instance instance = make_instance(
      {"s", "a", "b", "c", "d", "t"},
      {{"s", "a", 1}, {"a", "t", 1}, {"s", "b", 1}, {"b", "t", 1}, {"c", "d", 1}},
      {{0, "s", "t", 1, {"s", "a", "t"}, {"s", "b", "t"}}});
  MilpModel model = encode(instance, min_rounds(2.0, 1));
  bool found = false;
  for (const MilpConstraint& c : model.constraints()) {
    if (c.name.rfind("order_", 0) != 0) continue;
    found = true;
    CHECK(c.terms.size() == 3);
    CHECK(c.terms[0].coef == doctest::Approx(5.0));
    CHECK(c.rhs == doctest::Approx(4.0));
  }
  CHECK(found);
}

TEST_CASE("export is deterministic and parses back to the same matrix") {
  Rng rng(77);
  for (int i = 0; i < 10; ++i) {
    Instance instance = random_instance(rng, 6, 2);
    MilpModel model = encode(instance, min_rounds(1.5, 2));
    std::string text = export_lp(model);
    CHECK(text == export_lp(encode(instance, min_rounds(1.5, 2))));

    ParsedLp parsed = parse_lp_text(text);
    REQUIRE(parsed.rows.size() == model.constraints().size());
    for (const MilpConstraint& c : model.constraints()) {
      REQUIRE(parsed.rows.count(c.name));
      const auto& row = parsed.rows.at(c.name);
      CHECK(row.sense == c.sense);
      CHECK(row.rhs == doctest::Approx(c.rhs).epsilon(1e-12));
      REQUIRE(row.terms.size() == c.terms.size());
      for (const MilpTerm& t : c.terms) {
        const std::string& name = model.vars()[t.var].name;
        REQUIRE(row.terms.count(name));
        CHECK(row.terms.at(name) == doctest::Approx(t.coef).epsilon(1e-12));
      }
    }
    // Integrality sections round-trip too.
    for (const MilpVar& v : model.vars()) {
      if (v.kind == VarKind::kBinary) CHECK(parsed.binaries.count(v.name));
      if (v.kind == VarKind::kInteger) CHECK(parsed.generals.count(v.name));
    }
  }
}

TEST_CASE("parameter validation") {
  Instance instance = diamond();
  MilpParams params;
  params.objective = MilpObjective::kMinRounds;
  params.alpha = 0.5;
  CHECK_THROWS_AS(encode(instance, params), std::invalid_argument);
  params.alpha = 1.0;
  params.beta = -1.0;
  CHECK_THROWS_AS(encode(instance, params), std::invalid_argument);
}

TEST_CASE("solver: diamond needs two rounds (branch, then stale-node removal)") {
  if (!solver_available()) return;
  Instance instance = diamond();
  MilpModel model = encode(instance, min_rounds(1.0, 3));
  MilpSolution sol = solve_with_script(model);
  REQUIRE(sol.status == MilpSolution::Status::kOptimal);
  CHECK(std::lround(sol.objective) == 2);
  UpdateSchedule schedule = decode(instance, model, sol);
  CHECK(validate_schedule(instance, schedule).empty());
  CHECK(!check_loop_freedom(instance, schedule));
  CHECK(assess(instance, schedule).alpha_min <= 1.0 + 1e-6);
}

TEST_CASE("solver: delay example min-rounds at alpha 1 is 3") {
  if (!solver_available()) return;
  Instance instance = delay_example_instance();
  MilpModel model = encode(instance, min_rounds(1.0, 4));
  MilpSolution sol = solve_with_script(model);
  REQUIRE(sol.status == MilpSolution::Status::kOptimal);
  CHECK(std::lround(sol.objective) == 3);
}

TEST_CASE("solver: infeasible below the instance's minimum augmentation") {
  if (!solver_available()) return;
  // Two pairs that must cross the same edge transiently: alpha=1 with a
  // single round cannot work.
  Instance instance = delay_example_instance();
  MilpParams params = min_rounds(1.0, 1);
  MilpModel model = encode(instance, params);
  MilpSolution sol = solve_with_script(model);
  CHECK(sol.status == MilpSolution::Status::kInfeasible);
}

TEST_CASE("solver: min-alpha agrees with the exhaustive oracle") {
  if (!solver_available()) return;
  Instance instance = delay_example_instance();
  SearchBudget budget;
  budget.max_pairs = 4;
  for (int rounds : {2, 3}) {
    MilpParams params;
    params.objective = MilpObjective::kMinAlpha;
    params.rounds = rounds;
    MilpModel model = encode(instance, params);
    MilpSolution sol = solve_with_script(model);
    REQUIRE(sol.status == MilpSolution::Status::kOptimal);
    AlphaResult oracle = optimal_alpha(instance, rounds, budget);
    REQUIRE(oracle.status == SearchStatus::kFeasible);
    CHECK(sol.objective == doctest::Approx(oracle.alpha).epsilon(1e-6));
  }
}

TEST_CASE("solver: decoded schedules respect the model augmentation") {
  if (!solver_available()) return;
  Rng rng(8888);
  int solved = 0;
  for (int i = 0; i < 12; ++i) {
    Instance instance = random_instance(rng, 6, 2, /*force_nontrivial=*/true);
    MilpModel model = encode(instance, min_rounds(1.5, 3));
    MilpSolution sol = solve_with_script(model);
    if (sol.status != MilpSolution::Status::kOptimal) continue;
    ++solved;
    UpdateSchedule schedule = decode(instance, model, sol);
    AugmentationReport report = assess(instance, schedule);
    CHECK(report.loop_free);
    CHECK(report.alpha_min <= 1.5 + 1e-6);
    CHECK(report.rounds_used <= std::lround(sol.objective));
  }
  CHECK(solved >= 6);
}

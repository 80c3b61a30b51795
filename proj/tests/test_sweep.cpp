#include <doctest.h>

#include <sstream>

#include "netupd/sweep.hpp"
#include "testutil.hpp"

using namespace netupd;
using namespace netupd::testutil;

TEST_CASE("alpha grid spans [1,2] in 0.05 steps by default") {
  SweepSpec spec;
  auto grid = alpha_grid(spec);
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(1.0));
  CHECK(grid.back() == doctest::Approx(2.0));
  spec.alpha_hi = 2.5;
  CHECK_THROWS_AS(alpha_grid(spec), std::invalid_argument);
}

TEST_CASE("sweep rows carry the delay-example story across algorithms") {
  SweepSpec spec;
  spec.alpha_lo = 1.0;
  spec.alpha_hi = 1.0;
  spec.alpha_step = 0.05;
  spec.algorithms = {"greedy", "delay", "exact"};
  spec.budget.max_pairs = 4;
  SweepInput input{"delayex", 1, delay_example_instance()};
  auto rows = run_sweep({input}, spec);
  REQUIRE(rows.size() == 3);
  // Sorted by algorithm: delay, exact, greedy.
  CHECK(rows[0].algorithm == "delay");
  CHECK(rows[0].feasible);
  CHECK(rows[0].rounds == 3);
  CHECK(rows[1].algorithm == "exact");
  CHECK(rows[1].rounds == 3);
  CHECK(rows[2].algorithm == "greedy");
  CHECK(!rows[2].feasible);  // greedy needs alpha 2
}

TEST_CASE("csv schema is stable") {
  SweepRow row;
  row.topology = "demo";
  row.seed = 1;
  row.algorithm = "greedy";
  row.alpha = 1.05;
  row.rounds = 2;
  row.alpha_min = 2;
  row.beta_min = 1;
  row.feasible = false;
  row.status = "ok";
  std::string csv = sweep_csv({row});
  std::istringstream in(csv);
  std::string header, line, aggregate;
  std::getline(in, header);
  std::getline(in, line);
  std::getline(in, aggregate);
  CHECK(header == "topology,seed,algorithm,alpha,rounds,alpha_min,beta_min,feasible,status");
  CHECK(line == "demo,1,greedy,1.05,2,2,1,0,ok");
  CHECK(aggregate == "ALL,0,greedy,1.05,0,0,0,0,aggregate");
}

TEST_CASE("parallel sweeps match the single-threaded row set") {
  Rng rng(5);
  std::vector<SweepInput> inputs;
  for (int i = 0; i < 3; ++i)
    inputs.push_back({"rand" + std::to_string(i), static_cast<std::uint64_t>(i),
                      random_instance(rng, 7, 2)});
  SweepSpec spec;
  spec.alpha_lo = 1.0;
  spec.alpha_hi = 1.5;
  spec.alpha_step = 0.25;
  spec.algorithms = {"greedy", "exact"};
  spec.budget.max_pairs = 4;
  spec.jobs = 1;
  auto sequential = sweep_csv(run_sweep(inputs, spec));
  spec.jobs = 4;
  auto parallel = sweep_csv(run_sweep(inputs, spec));
  CHECK(sequential == parallel);
}

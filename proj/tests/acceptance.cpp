// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Tolerances are pinned in code; SKIP is reported only when an
// external dependency is genuinely absent (and never counts as a pass).

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "netupd/checker.hpp"
#include "netupd/delay.hpp"
#include "netupd/exact.hpp"
#include "netupd/greedy.hpp"
#include "netupd/hardness.hpp"
#include "netupd/milp.hpp"
#include "netupd/rng.hpp"
#include "netupd/workload.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace netupd;
using namespace netupd::testutil;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            bool skip = false) {
  const char* tag = skip ? "SKIP" : pass ? "PASS" : "FAIL";
  std::printf("[%s] criterion %d: %s%s%s\n", tag, criterion, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass && !skip) ++g_failures;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- criterion 1 & 2: universal bounds and greedy guarantees ----

void criteria_1_2() {
  auto start = Clock::now();
  Rng rng(0xC0FFEE);
  const int draws = 1000;
  int alpha_violations = 0, beta_violations = 0;
  int greedy_bound_violations = 0, greedy_check_failures = 0;
  for (int i = 0; i < draws; ++i) {
    Instance instance = random_instance(rng, 10, 4);
    UpdateSchedule schedule = random_valid_schedule(instance, rng);
    AugmentationReport rep = assess(instance, schedule);
    if (!rep.loop_free || rep.alpha_min > 2.0 + 1e-9) ++alpha_violations;
    if (rep.beta_min > instance.network.cmax() + 1e-9) ++beta_violations;

    UpdateSchedule greedy = greedy_all(instance);
    for (size_t p = 0; p < instance.pairs.size(); ++p)
      if (greedy.pair_rounds(static_cast<int>(p)) >
          static_cast<int>(instance.pairs[p].new_path.size()))
        ++greedy_bound_violations;
    if (check_loop_freedom(instance, greedy) || check_connectivity(instance, greedy))
      ++greedy_check_failures;
  }
  double secs = seconds_since(start);
  {
    std::ostringstream detail;
    detail << draws << " draws, " << alpha_violations << " alpha / " << beta_violations
           << " beta violations, " << secs << "s";
    report(1, "every loop-free schedule is (x2)- and (+Cmax)-valid",
           alpha_violations == 0 && beta_violations == 0 && secs < 60.0, detail.str());
  }
  {
    std::ostringstream detail;
    detail << greedy_bound_violations << " round-bound violations, " << greedy_check_failures
           << " loop/connectivity failures";
    report(2, "greedy round bound and safety on the same corpus",
           greedy_bound_violations == 0 && greedy_check_failures == 0, detail.str());
  }
}

// ---- criterion 3: the worked delay example ----

void criterion_3() {
  Instance instance = delay_example_instance();
  AugmentationReport greedy_rep = assess(instance, greedy_all(instance));
  DelayConfig config;
  config.threshold = 1;
  AugmentationReport delay_rep =
      assess(instance, delay_optimize(instance, greedy_all(instance), config));
  SearchBudget budget;
  budget.max_pairs = 4;
  RoundsResult exact_rep = optimal_rounds(instance, 1.0, 0.0, budget);
  bool pass = greedy_rep.alpha_min == 2.0 && delay_rep.alpha_min == 1.0 &&
              exact_rep.status == SearchStatus::kFeasible && exact_rep.rounds == 3;
  std::ostringstream detail;
  detail << "greedy alpha " << greedy_rep.alpha_min << ", delay(T=1) alpha "
         << delay_rep.alpha_min << ", exact rounds " << exact_rep.rounds;
  report(3, "worked delay example (greedy, delay, exact)", pass, detail.str());
}

// ---- criterion 4: oracle/solver equivalence ----

void criterion_4() {
  Rng rng(0x4D494C50);  // "MILP"
  const int wanted = 50;
  int compared = 0, mismatches = 0, alpha_mismatches = 0, roundtrip_failures = 0;
  SearchBudget budget;
  budget.max_pairs = 4;
  budget.max_nodes_per_pair = 10;
  budget.max_horizon = 6;
  bool have_solver = solver_available();

  while (compared < wanted) {
    Instance instance = random_instance(rng, 7, 2, /*force_nontrivial=*/true);
    // Same horizon on both sides: the model's round range is capped at
    // k*(n-1).
    int horizon = std::min(budget.max_horizon,
                           static_cast<int>(instance.pairs.size()) *
                               (instance.network.node_count() - 1));
    SearchBudget capped = budget;
    capped.max_horizon = horizon;
    RoundsResult oracle = optimal_rounds(instance, 1.25, 0.0, capped);
    if (oracle.status == SearchStatus::kBudgetExceeded) continue;

    MilpParams params;
    params.objective = MilpObjective::kMinRounds;
    params.alpha = 1.25;
    params.rounds = horizon;
    MilpModel model = encode(instance, params);
    std::string lp = export_lp(model);
    ParsedLp parsed = parse_lp_text(lp);
    if (parsed.rows.size() != model.constraints().size()) ++roundtrip_failures;

    if (have_solver) {
      MilpSolution sol = solve_external(lp, solver_command(), 120.0);
      if (oracle.status == SearchStatus::kInfeasible) {
        if (sol.status != MilpSolution::Status::kInfeasible) ++mismatches;
      } else {
        if (sol.status != MilpSolution::Status::kOptimal ||
            std::lround(sol.objective) != oracle.rounds)
          ++mismatches;
        else {
          UpdateSchedule decoded = decode(instance, model, sol);
          AugmentationReport rep = assess(instance, decoded);
          if (!rep.loop_free || rep.alpha_min > 1.25 + 1e-6) ++roundtrip_failures;
        }
      }

      // min-alpha comparison on a fixed small round count.
      int rounds = oracle.status == SearchStatus::kFeasible ? std::max(oracle.rounds, 2) : 4;
      AlphaResult alpha_oracle = optimal_alpha(instance, rounds, budget);
      if (alpha_oracle.status == SearchStatus::kFeasible) {
        MilpParams aparams;
        aparams.objective = MilpObjective::kMinAlpha;
        aparams.rounds = rounds;
        MilpModel amodel = encode(instance, aparams);
        MilpSolution asol = solve_external(export_lp(amodel), solver_command(), 120.0);
        if (asol.status != MilpSolution::Status::kOptimal ||
            std::abs(asol.objective - alpha_oracle.alpha) > 1e-6)
          ++alpha_mismatches;
      }
    }
    ++compared;
  }

  std::ostringstream detail;
  detail << compared << " instances";
  if (have_solver)
    detail << ", " << mismatches << " min-R mismatches, " << alpha_mismatches
           << " min-alpha mismatches, " << roundtrip_failures << " round-trip failures";
  else
    detail << ", solver absent; encode round-trips checked (" << roundtrip_failures
           << " failures)";
  bool pass = roundtrip_failures == 0 && mismatches == 0 && alpha_mismatches == 0;
  report(4, "exhaustive oracle and solver agree", have_solver ? pass : roundtrip_failures == 0,
         detail.str(), /*skip=*/!have_solver);
}

// ---- criterion 5: gadget round-trips and unsatisfiable instances ----

void criterion_5() {
  auto start = Clock::now();
  Rng rng(0x54534154);  // "TSAT"
  const double eps = 0.25;
  int built = 0, failures = 0;
  while (built < 20) {
    int vars = rng.uniform_int(1, 4);
    int clause_count = rng.uniform_int(1, 5);
    std::vector<std::array<int, 3>> clauses;
    for (int c = 0; c < clause_count; ++c) {
      std::array<int, 3> clause;
      for (int s = 0; s < 3; ++s) {
        int v = rng.uniform_int(1, vars);
        clause[s] = rng.coin() ? v : -v;
      }
      clauses.push_back(clause);
    }
    Cnf3 cnf = Cnf3::from_clauses(vars, clauses);
    if (cnf.clauses.empty()) continue;
    std::vector<bool> assignment;
    for (int mask = 0; mask < (1 << vars) && assignment.empty(); ++mask) {
      std::vector<bool> candidate(vars);
      for (int v = 0; v < vars; ++v) candidate[v] = mask & (1 << v);
      if (cnf.satisfies(candidate)) assignment = candidate;
    }
    if (assignment.empty()) continue;
    ++built;

    GadgetInstance mult = build_multiplicative(cnf, eps);
    UpdateSchedule mult_schedule = schedule_from_assignment(mult, assignment);
    AugmentationReport mult_rep = assess(mult.instance, mult_schedule);
    if (!mult_rep.valid(2.0 - eps, 0.0, mult.instance.network)) ++failures;
    if (assignment_from_schedule(mult, mult_schedule) != assignment) ++failures;

    GadgetInstance add = build_additive(cnf, eps);
    UpdateSchedule add_schedule = schedule_from_assignment(add, assignment);
    AugmentationReport add_rep = assess(add.instance, add_schedule);
    double cmax = add.instance.network.cmax();
    if (!add_rep.valid(1.0, cmax / 3.0 - eps, add.instance.network)) ++failures;
    if (assignment_from_schedule(add, add_schedule) != assignment) ++failures;
  }

  // Unsatisfiable formulas: exhaustive search proves no schedule exists at
  // (x(2-eps)).
  std::vector<std::pair<int, std::vector<std::array<int, 3>>>> unsat = {
      {1, {{1, 1, 1}, {-1, -1, -1}}},
      {2, {{1, 1, 1}, {-1, 2, 2}, {-1, -2, -2}}},
      {2, {{1, 2, 2}, {1, -2, -2}, {-1, 2, 2}, {-1, -2, -2}}},
      {2, {{1, 1, 2}, {-2, -2, 1}, {-1, -1, 2}, {-1, -2, -2}}},
      {3, {{1, 1, 1}, {-1, 2, 2}, {-1, -2, 3}, {-1, -2, -3}}},
  };
  int unsat_failures = 0;
  for (const auto& [vars, clauses] : unsat) {
    Cnf3 cnf = Cnf3::from_clauses(vars, clauses);
    GadgetInstance gadget = build_multiplicative(cnf, eps);
    SearchBudget budget;
    budget.max_pairs = 16;
    budget.max_nodes_per_pair = 40;
    budget.max_horizon = gadget.proof_rounds();
    budget.timeout = std::chrono::seconds(100);
    RoundsResult result = optimal_rounds(gadget.instance, gadget.target_alpha(), 0.0, budget);
    if (result.status != SearchStatus::kInfeasible) ++unsat_failures;
  }
  double secs = seconds_since(start);
  std::ostringstream detail;
  detail << built << " satisfiable formulas, " << failures << " round-trip failures, "
         << unsat.size() << " unsatisfiable formulas, " << unsat_failures
         << " not proven infeasible, " << secs << "s";
  report(5, "hardness gadget round-trip", failures == 0 && unsat_failures == 0 && secs < 600.0,
         detail.str());
}

// ---- criterion 6: augmentation-speed tradeoff at desk scale ----

// Experiment design: one instance per bundled topology, taking the first
// seed whose instance needs at least three rounds without augmentation
// (trivial one-shot instances have nothing to compress; the selection never
// looks at augmented results). High link utilization (growth 1.01) matches
// the workload defaults' intent at desk scale.
void criterion_6() {
  auto start = Clock::now();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(NETUPD_TOPOLOGY_DIR))
    if (entry.path().extension() == ".graphml") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  SearchBudget budget;
  budget.max_pairs = 10;
  budget.max_nodes_per_pair = 14;
  budget.max_horizon = 8;
  budget.timeout = std::chrono::seconds(120);

  std::vector<Instance> corpus;
  for (const fs::path& file : files) {
    Network topo = ingest_topology(slurp(file.string()));
    if (topo.node_count() > 15) continue;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      WorkloadConfig config;
      config.pair_count = 10;
      config.growth = 1.01;
      config.seed = seed;
      Instance instance = generate_instance(topo, config);
      if (!validate_instance(instance).empty()) continue;
      RoundsResult base = optimal_rounds(instance, 1.0, 0.0, budget);
      if (base.status == SearchStatus::kFeasible && base.rounds >= 3) {
        corpus.push_back(std::move(instance));
        break;
      }
    }
  }

  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(1.0 + 0.05 * i);

  double sum_rounds_100 = 0.0, sum_rounds_110 = 0.0;
  int strict_decreases = 0, comparable = 0;
  bool monotone_feasibility = true;
  for (const Instance& instance : corpus) {
    std::vector<int> feasible_at;
    int rounds_100 = -1, rounds_110 = -1;
    for (double alpha : grid) {
      RoundsResult result = optimal_rounds(instance, alpha, 0.0, budget);
      bool feasible = result.status == SearchStatus::kFeasible;
      feasible_at.push_back(feasible ? 1 : 0);
      if (std::abs(alpha - 1.0) < 1e-9 && feasible) rounds_100 = result.rounds;
      if (std::abs(alpha - 1.10) < 1e-9 && feasible) rounds_110 = result.rounds;
    }
    for (size_t i = 1; i < feasible_at.size(); ++i)
      if (feasible_at[i] < feasible_at[i - 1]) monotone_feasibility = false;
    if (rounds_100 >= 0 && rounds_110 >= 0) {
      ++comparable;
      sum_rounds_100 += rounds_100;
      sum_rounds_110 += rounds_110;
      if (rounds_110 < rounds_100) ++strict_decreases;
    }
  }

  double mean_100 = comparable ? sum_rounds_100 / comparable : 0.0;
  double mean_110 = comparable ? sum_rounds_110 / comparable : 0.0;
  double reduction = mean_100 > 0.0 ? (mean_100 - mean_110) / mean_100 : 0.0;
  double secs = seconds_since(start);
  bool pass = corpus.size() >= 10 && comparable >= 10 && mean_110 <= mean_100 &&
              strict_decreases >= 1 && monotone_feasibility && reduction >= 0.15 &&
              secs < 1800.0;
  std::ostringstream detail;
  detail << corpus.size() << " instances, mean rounds " << mean_100 << " -> " << mean_110
         << " (-" << std::round(reduction * 1000.0) / 10.0 << "%), " << strict_decreases
         << " strict decreases, feasibility monotone " << (monotone_feasibility ? "yes" : "no")
         << ", " << secs << "s";
  report(6, "augmentation-speed tradeoff at desk scale", pass, detail.str());
}

// ---- criterion 7: checker dominance over the interleaving oracle ----

void criterion_7() {
  Rng rng(0xD011A5);
  const int wanted = 500;
  int checked = 0, violations = 0;
  while (checked < wanted) {
    Instance instance = random_instance(rng, 8, 3);
    UpdateSchedule schedule = random_valid_schedule(instance, rng);
    Checker checker(instance);
    for (int r = 1; r <= schedule.horizon() && checked < wanted; ++r) {
      int events = 0;
      for (size_t p = 0; p < schedule.rounds.size(); ++p) {
        int local = r - schedule.start_offset[p];
        if (local >= 1 && local <= static_cast<int>(schedule.rounds[p].size()))
          events += static_cast<int>(schedule.rounds[p][local - 1].size());
      }
      if (events == 0 || events > 8) continue;
      auto oracle = interleaving_oracle(instance, schedule, r);
      for (const auto& [edge, load] : oracle)
        if (checker.worst_case_load(schedule, r, edge) < load - 1e-9) ++violations;
      ++checked;
    }
  }
  std::ostringstream detail;
  detail << checked << " rounds, " << violations << " dominance violations";
  report(7, "analytic worst-case load dominates the interleaving oracle", violations == 0,
         detail.str());
}

// ---- criterion 8: byte-identical reproducibility of the CLI ----

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + NETUPD_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& rel : fa)
    if (slurp((a / rel).string()) != slurp((b / rel).string())) return false;
  return true;
}

void criterion_8() {
  fs::path work = fs::temp_directory_path() / ("netupd_accept_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  std::string topo = NETUPD_TOPOLOGY_DIR;

  bool pass = true;
  std::string detail;
  for (int run = 0; run < 2; ++run) {
    fs::path out = work / ("gen" + std::to_string(run));
    if (run_cli("--seed 9 generate --topology-dir \"" + topo + "\" --pairs 8 --out \"" +
                out.string() + "\"") != 0) {
      pass = false;
      detail = "generate failed";
    }
  }
  if (pass && !same_tree(work / "gen0", work / "gen1")) {
    pass = false;
    detail = "generate outputs differ";
  }

  if (pass) {
    fs::path small = work / "sweep_in";
    fs::create_directories(small);
    int copied = 0;
    for (const auto& e : fs::directory_iterator(work / "gen0")) {
      if (copied >= 3) break;
      fs::copy_file(e.path(), small / e.path().filename());
      ++copied;
    }
    for (int run = 0; run < 2; ++run) {
      fs::path csv = work / ("sweep" + std::to_string(run) + ".csv");
      if (run_cli("--jobs 3 sweep --instances \"" + small.string() +
                  "\" --algorithms greedy,delay --alpha-grid 1.0:2.0:0.25 --out \"" +
                  csv.string() + "\"") != 0) {
        pass = false;
        detail = "sweep failed";
      }
    }
    if (pass && slurp((work / "sweep0.csv").string()) != slurp((work / "sweep1.csv").string())) {
      pass = false;
      detail = "sweep outputs differ";
    }
  }
  fs::remove_all(work);
  report(8, "generate and sweep are byte-deterministic under fixed seeds", pass, detail);
}

}  // namespace

int main() {
  criteria_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures) {
    std::printf("%d criterion failure(s)\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "netupd/checker.hpp"
#include "netupd/delay.hpp"
#include "netupd/exact.hpp"
#include "netupd/greedy.hpp"
#include "netupd/hardness.hpp"
#include "netupd/milp.hpp"
#include "netupd/sweep.hpp"
#include "netupd/workload.hpp"

namespace fs = std::filesystem;
using namespace netupd;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& content) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

Instance load_instance(const std::string& path) { return read_instance(slurp(path)); }

void print_report(const Instance& instance, const AugmentationReport& report) {
  std::cout << write_report(instance, report);
}

// Every schedule leaves the toolkit checked: well-formed and loop-free.
void emit_schedule(const std::string& path, const Instance& instance,
                   const UpdateSchedule& schedule) {
  auto violations = validate_schedule(instance, schedule);
  if (!violations.empty())
    throw std::runtime_error("refusing to write ill-formed schedule: " + violations.front());
  if (auto loop = check_loop_freedom(instance, schedule))
    throw std::runtime_error("refusing to write schedule with a transient loop at round " +
                             std::to_string(loop->round));
  spill(path, write_schedule(instance, schedule));
}

MilpParams milp_params_from(const std::string& objective, double alpha, double beta, int rounds,
                            int horizon, bool binary_flows) {
  MilpParams params;
  if (objective == "rounds") {
    params.objective = MilpObjective::kMinRounds;
    params.rounds = horizon;
  } else if (objective == "alpha") {
    params.objective = MilpObjective::kMinAlpha;
    params.rounds = rounds;
  } else if (objective == "beta") {
    params.objective = MilpObjective::kMinBeta;
    params.rounds = rounds;
  } else {
    throw CLI::ValidationError("--objective must be rounds, alpha or beta");
  }
  params.alpha = alpha;
  params.beta = beta;
  params.binary_flows = binary_flows;
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scheduling toolkit for consistent network updates under bounded link augmentation"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for sweeps")->capture_default_str();

  // ---- generate ----
  auto* cmd_generate = app.add_subcommand("generate", "build instances from a topology directory");
  std::string topo_dir, gen_out = "instances";
  WorkloadConfig wconfig;
  int max_nodes = 0;
  std::string weights_mode = "shared", waypoint_mode = "independent";
  cmd_generate->add_option("--topology-dir", topo_dir, "directory of GraphML files")->required();
  cmd_generate->add_option("--out", gen_out, "output directory")->capture_default_str();
  cmd_generate->add_option("--pairs", wconfig.pair_count, "flow pairs per instance")
      ->capture_default_str();
  cmd_generate->add_option("--baseline-count", wconfig.baseline_count,
                           "baseline flows (-1: same as --pairs)")
      ->capture_default_str();
  cmd_generate->add_option("--growth", wconfig.growth, "slow-start growth factor")
      ->capture_default_str();
  cmd_generate->add_option("--max-nodes", max_nodes, "skip topologies above this size (0: keep all)")
      ->capture_default_str();
  cmd_generate->add_option("--weight-min", wconfig.weight_min)->capture_default_str();
  cmd_generate->add_option("--weight-max", wconfig.weight_max)->capture_default_str();
  cmd_generate->add_option("--demand-min", wconfig.demand_min)->capture_default_str();
  cmd_generate->add_option("--demand-max", wconfig.demand_max)->capture_default_str();
  cmd_generate->add_option("--weights", weights_mode, "shared | per-pair")->capture_default_str();
  cmd_generate->add_option("--waypoint-mode", waypoint_mode, "independent | shared")
      ->capture_default_str();

  // ---- schedule ----
  auto* cmd_schedule = app.add_subcommand("schedule", "run greedy or delay on an instance");
  std::string sched_instance, algorithm = "greedy", sched_out;
  DelayConfig delay_config;
  std::string delay_objective = "mult";
  cmd_schedule->add_option("instance", sched_instance, "instance document")->required();
  cmd_schedule->add_option("--algorithm", algorithm, "greedy | delay")->capture_default_str();
  cmd_schedule->add_option("--delay-threshold", delay_config.threshold)->capture_default_str();
  cmd_schedule->add_option("--delay-objective", delay_objective, "mult | add")
      ->capture_default_str();
  cmd_schedule->add_option("--out", sched_out, "write the schedule document here");

  // ---- assess ----
  auto* cmd_assess = app.add_subcommand("assess", "validate a schedule and report augmentation");
  std::string assess_instance, assess_schedule, assess_out;
  cmd_assess->add_option("instance", assess_instance)->required();
  cmd_assess->add_option("schedule", assess_schedule)->required();
  cmd_assess->add_option("--out", assess_out, "write the report here");

  // ---- encode ----
  auto* cmd_encode = app.add_subcommand("encode", "emit the optimization model in LP format");
  std::string enc_instance, enc_objective = "rounds", enc_out = "model.lp";
  double enc_alpha = 1.0, enc_beta = 0.0;
  int enc_rounds = 0, enc_horizon = 0;
  bool enc_binary_flows = false;
  cmd_encode->add_option("instance", enc_instance)->required();
  cmd_encode->add_option("--objective", enc_objective, "rounds | alpha | beta")
      ->capture_default_str();
  cmd_encode->add_option("--alpha", enc_alpha)->capture_default_str();
  cmd_encode->add_option("--beta", enc_beta)->capture_default_str();
  cmd_encode->add_option("--rounds", enc_rounds, "fixed round count (alpha/beta objectives)");
  cmd_encode->add_option("--horizon", enc_horizon, "round horizon (rounds objective; 0: k*(n-1))");
  cmd_encode->add_flag("--binary-flows", enc_binary_flows, "declare flow variables binary");
  cmd_encode->add_option("--out", enc_out)->capture_default_str();

  // ---- solve ----
  auto* cmd_solve = app.add_subcommand("solve", "encode, run an external solver, decode");
  std::string sol_instance, sol_objective = "rounds", sol_solver, sol_out;
  double sol_alpha = 1.0, sol_beta = 0.0, sol_time_limit = 0.0;
  int sol_rounds = 0, sol_horizon = 0;
  bool sol_binary_flows = false;
  cmd_solve->add_option("instance", sol_instance)->required();
  cmd_solve->add_option("--objective", sol_objective, "rounds | alpha | beta")
      ->capture_default_str();
  cmd_solve->add_option("--alpha", sol_alpha)->capture_default_str();
  cmd_solve->add_option("--beta", sol_beta)->capture_default_str();
  cmd_solve->add_option("--rounds", sol_rounds);
  cmd_solve->add_option("--horizon", sol_horizon);
  cmd_solve->add_flag("--binary-flows", sol_binary_flows);
  cmd_solve->add_option("--solver-cmd", sol_solver, "command with {lp} {sol} {timelimit}")
      ->required();
  cmd_solve->add_option("--time-limit", sol_time_limit, "seconds (0: none)")
      ->capture_default_str();
  cmd_solve->add_option("--out", sol_out, "write the decoded schedule here");

  // ---- exact ----
  auto* cmd_exact = app.add_subcommand("exact", "exhaustive oracle for desk-scale instances");
  std::string ex_instance, ex_objective = "rounds", ex_out;
  double ex_alpha = 1.0, ex_beta = 0.0, ex_timeout = 120.0;
  int ex_rounds = 0;
  SearchBudget budget;
  cmd_exact->add_option("instance", ex_instance)->required();
  cmd_exact->add_option("--objective", ex_objective, "rounds | alpha | beta")
      ->capture_default_str();
  cmd_exact->add_option("--alpha", ex_alpha)->capture_default_str();
  cmd_exact->add_option("--beta", ex_beta)->capture_default_str();
  cmd_exact->add_option("--rounds", ex_rounds, "fixed rounds (alpha/beta objectives)");
  cmd_exact->add_option("--max-horizon", budget.max_horizon)->capture_default_str();
  cmd_exact->add_option("--max-pairs", budget.max_pairs)->capture_default_str();
  cmd_exact->add_option("--max-nodes-per-pair", budget.max_nodes_per_pair)->capture_default_str();
  cmd_exact->add_option("--timeout", ex_timeout, "seconds")->capture_default_str();
  cmd_exact->add_option("--out", ex_out, "write the witness schedule here");

  // ---- gadget ----
  auto* cmd_gadget = app.add_subcommand("gadget", "build a hardness instance from a 3-CNF formula");
  std::string gad_cnf, gad_variant = "mult", gad_out = "gadget.inst", gad_roles;
  double gad_epsilon = 0.25;
  cmd_gadget->add_option("cnf", gad_cnf, "DIMACS file")->required();
  cmd_gadget->add_option("--variant", gad_variant, "mult | add")->capture_default_str();
  cmd_gadget->add_option("--epsilon", gad_epsilon)->capture_default_str();
  cmd_gadget->add_option("--out", gad_out)->capture_default_str();
  cmd_gadget->add_option("--role-map", gad_roles, "sidecar path (default: <out>.roles)");

  // ---- sweep ----
  auto* cmd_sweep = app.add_subcommand("sweep", "run algorithms over an alpha grid, emit CSV");
  std::string sweep_dir, sweep_out = "sweep.csv", sweep_algorithms = "greedy,delay,exact";
  std::string sweep_grid = "1.0:2.0:0.05", sweep_solver;
  SweepSpec spec;
  cmd_sweep->add_option("--instances", sweep_dir, "directory of instance documents")->required();
  cmd_sweep->add_option("--algorithms", sweep_algorithms, "comma list: greedy,delay,exact,milp")
      ->capture_default_str();
  cmd_sweep->add_option("--alpha-grid", sweep_grid, "lo:hi:step")->capture_default_str();
  cmd_sweep->add_option("--delay-threshold", spec.delay_threshold)->capture_default_str();
  cmd_sweep->add_option("--max-horizon", spec.budget.max_horizon)->capture_default_str();
  cmd_sweep->add_option("--max-pairs", spec.budget.max_pairs)->capture_default_str();
  cmd_sweep->add_option("--max-nodes-per-pair", spec.budget.max_nodes_per_pair)
      ->capture_default_str();
  cmd_sweep->add_option("--solver-cmd", sweep_solver);
  cmd_sweep->add_option("--time-limit", spec.time_limit_s)->capture_default_str();
  cmd_sweep->add_option("--milp-horizon", spec.milp_horizon)->capture_default_str();
  cmd_sweep->add_option("--out", sweep_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_generate) {
      wconfig.seed = seed;
      wconfig.per_pair_weights = weights_mode == "per-pair";
      wconfig.shared_waypoint = waypoint_mode == "shared";
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(topo_dir))
        if (entry.path().extension() == ".graphml") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) {
        Network topo = ingest_topology(slurp(file.string()));
        if (max_nodes > 0 && topo.node_count() > max_nodes) {
          std::cerr << "skip " << file.filename().string() << ": " << topo.node_count()
                    << " nodes\n";
          continue;
        }
        Instance instance = generate_instance(topo, wconfig);
        std::string name = file.stem().string() + "_s" + std::to_string(seed) + ".inst";
        spill((fs::path(gen_out) / name).string(), write_instance(instance));
        std::cout << name << "\n";
      }
      return 0;
    }

    if (*cmd_schedule) {
      Instance instance = load_instance(sched_instance);
      UpdateSchedule schedule = greedy_all(instance);
      if (algorithm == "delay") {
        delay_config.objective = delay_objective == "add" ? DelayConfig::Objective::kAdditive
                                                          : DelayConfig::Objective::kMultiplicative;
        schedule = delay_optimize(instance, schedule, delay_config);
      } else if (algorithm != "greedy") {
        throw CLI::ValidationError("--algorithm must be greedy or delay");
      }
      AugmentationReport report = assess(instance, schedule);
      if (!sched_out.empty()) emit_schedule(sched_out, instance, schedule);
      print_report(instance, report);
      return 0;
    }

    if (*cmd_assess) {
      Instance instance = load_instance(assess_instance);
      UpdateSchedule schedule = read_schedule(instance, slurp(assess_schedule));
      auto violations = validate_schedule(instance, schedule);
      for (const std::string& v : violations) std::cerr << "invalid: " << v << "\n";
      AugmentationReport report = assess(instance, schedule);
      std::string text = write_report(instance, report);
      if (!assess_out.empty()) spill(assess_out, text);
      std::cout << text;
      return violations.empty() ? 0 : 1;
    }

    if (*cmd_encode) {
      Instance instance = load_instance(enc_instance);
      MilpParams params = milp_params_from(enc_objective, enc_alpha, enc_beta, enc_rounds,
                                           enc_horizon, enc_binary_flows);
      spill(enc_out, export_lp(encode(instance, params)));
      std::cout << enc_out << "\n";
      return 0;
    }

    if (*cmd_solve) {
      Instance instance = load_instance(sol_instance);
      MilpParams params = milp_params_from(sol_objective, sol_alpha, sol_beta, sol_rounds,
                                           sol_horizon, sol_binary_flows);
      MilpModel model = encode(instance, params);
      MilpSolution solution = solve_external(export_lp(model), sol_solver, sol_time_limit);
      switch (solution.status) {
        case MilpSolution::Status::kOptimal: {
          UpdateSchedule schedule = decode(instance, model, solution);
          std::cout << "objective " << format_number(solution.objective) << "\n";
          if (!sol_out.empty()) emit_schedule(sol_out, instance, schedule);
          print_report(instance, assess(instance, schedule));
          return 0;
        }
        case MilpSolution::Status::kInfeasible:
          std::cout << "infeasible\n";
          return 0;
        case MilpSolution::Status::kTimeout:
          std::cout << "timeout\n";
          return 1;
        case MilpSolution::Status::kError:
          std::cerr << "solver error: " << solution.detail << "\n";
          return 1;
      }
    }

    if (*cmd_exact) {
      Instance instance = load_instance(ex_instance);
      budget.timeout = std::chrono::duration<double>(ex_timeout);
      if (ex_objective == "rounds") {
        RoundsResult result = optimal_rounds(instance, ex_alpha, ex_beta, budget);
        switch (result.status) {
          case SearchStatus::kFeasible:
            std::cout << "rounds " << result.rounds << "\n";
            if (!ex_out.empty()) emit_schedule(ex_out, instance, result.witness);
            return 0;
          case SearchStatus::kInfeasible:
            std::cout << "infeasible\n";
            return 0;
          case SearchStatus::kBudgetExceeded:
            std::cout << "budget-exceeded\n";
            return 1;
        }
      } else if (ex_objective == "alpha") {
        AlphaResult result = optimal_alpha(instance, ex_rounds, budget);
        switch (result.status) {
          case SearchStatus::kFeasible:
            std::cout << "alpha " << format_number(result.alpha) << "\n";
            if (!ex_out.empty()) emit_schedule(ex_out, instance, result.witness);
            return 0;
          case SearchStatus::kInfeasible:
            std::cout << "infeasible\n";
            return 0;
          case SearchStatus::kBudgetExceeded:
            std::cout << "budget-exceeded\n";
            return 1;
        }
      } else if (ex_objective == "beta") {
        BetaResult result = optimal_beta(instance, ex_rounds, budget);
        switch (result.status) {
          case SearchStatus::kFeasible:
            std::cout << "beta " << format_number(result.beta) << "\n";
            if (!ex_out.empty()) emit_schedule(ex_out, instance, result.witness);
            return 0;
          case SearchStatus::kInfeasible:
            std::cout << "infeasible\n";
            return 0;
          case SearchStatus::kBudgetExceeded:
            std::cout << "budget-exceeded\n";
            return 1;
        }
      } else {
        throw CLI::ValidationError("--objective must be rounds, alpha or beta");
      }
    }

    if (*cmd_gadget) {
      Cnf3 cnf = Cnf3::parse_dimacs(slurp(gad_cnf));
      GadgetInstance gadget = gad_variant == "add" ? build_additive(cnf, gad_epsilon)
                                                   : build_multiplicative(cnf, gad_epsilon);
      spill(gad_out, write_instance(gadget.instance));
      std::string roles = gad_roles.empty() ? gad_out + ".roles" : gad_roles;
      spill(roles, write_role_map(gadget));
      std::cout << gad_out << "\n" << roles << "\n";
      return 0;
    }

    if (*cmd_sweep) {
      spec.jobs = jobs;
      spec.solver_cmd = sweep_solver;
      spec.algorithms.clear();
      std::istringstream algs(sweep_algorithms);
      std::string a;
      while (std::getline(algs, a, ','))
        if (!a.empty()) spec.algorithms.push_back(a);
      {
        std::istringstream gs(sweep_grid);
        std::string lo, hi, st;
        std::getline(gs, lo, ':');
        std::getline(gs, hi, ':');
        std::getline(gs, st, ':');
        spec.alpha_lo = std::stod(lo);
        spec.alpha_hi = std::stod(hi);
        spec.alpha_step = std::stod(st);
      }
      std::vector<SweepInput> inputs;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(sweep_dir))
        if (entry.path().extension() == ".inst") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) {
        SweepInput input;
        std::string stem = file.stem().string();
        auto pos = stem.rfind("_s");
        input.topology = pos == std::string::npos ? stem : stem.substr(0, pos);
        if (pos != std::string::npos) input.seed = std::stoull(stem.substr(pos + 2));
        input.instance = load_instance(file.string());
        inputs.push_back(std::move(input));
      }
      auto rows = run_sweep(inputs, spec);
      spill(sweep_out, sweep_csv(rows));
      spill(sweep_out + ".timing.csv", sweep_timing_csv(rows));
      std::cout << sweep_out << "\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

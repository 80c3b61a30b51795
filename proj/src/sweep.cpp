#include "netupd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "netupd/greedy.hpp"
#include "netupd/milp.hpp"

namespace netupd {

std::vector<double> alpha_grid(const SweepSpec& spec) {
  if (spec.alpha_lo < 1.0 || spec.alpha_hi > 2.0 || spec.alpha_step <= 0.0)
    throw std::invalid_argument("alpha grid must stay within [1, 2]");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double a = spec.alpha_lo + i * spec.alpha_step;
    if (a > spec.alpha_hi + 1e-12) break;
    grid.push_back(std::round(a * 10000.0) / 10000.0);
  }
  return grid;
}

namespace {

// All rows of one (instance, algorithm) cell.
std::vector<SweepRow> run_cell(const SweepInput& input, const std::string& algorithm,
                               const SweepSpec& spec, const std::vector<double>& grid) {
  std::vector<SweepRow> rows;
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto base_row = [&](double alpha) {
    SweepRow row;
    row.topology = input.topology;
    row.seed = input.seed;
    row.algorithm = algorithm;
    row.alpha = alpha;
    return row;
  };

  if (algorithm == "greedy" || algorithm == "delay") {
    UpdateSchedule schedule = greedy_all(input.instance);
    if (algorithm == "delay") {
      DelayConfig config;
      config.threshold = spec.delay_threshold;
      schedule = delay_optimize(input.instance, schedule, config);
    }
    AugmentationReport report = assess(input.instance, schedule);
    for (double alpha : grid) {
      SweepRow row = base_row(alpha);
      row.rounds = report.rounds_used;
      row.alpha_min = report.alpha_min;
      row.beta_min = report.beta_min;
      row.feasible = report.loop_free && report.alpha_min <= alpha + kLoadTolerance;
      row.status = "ok";
      row.wall_time_s = elapsed();
      rows.push_back(row);
    }
    return rows;
  }

  if (algorithm == "exact") {
    for (double alpha : grid) {
      SweepRow row = base_row(alpha);
      auto cell_start = std::chrono::steady_clock::now();
      SearchBudget budget = spec.budget;
      if (spec.time_limit_s > 0)
        budget.timeout = std::chrono::duration<double>(spec.time_limit_s);
      RoundsResult result = optimal_rounds(input.instance, alpha, 0.0, budget);
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start).count();
      switch (result.status) {
        case SearchStatus::kFeasible: {
          row.feasible = true;
          row.rounds = result.rounds;
          AugmentationReport report = assess(input.instance, result.witness);
          row.alpha_min = report.alpha_min;
          row.beta_min = report.beta_min;
          row.status = "ok";
          break;
        }
        case SearchStatus::kInfeasible:
          row.status = "infeasible";
          break;
        case SearchStatus::kBudgetExceeded:
          row.status = "budget";
          break;
      }
      rows.push_back(row);
    }
    return rows;
  }

  if (algorithm == "milp") {
    for (double alpha : grid) {
      SweepRow row = base_row(alpha);
      auto cell_start = std::chrono::steady_clock::now();
      try {
        MilpParams params;
        params.objective = MilpObjective::kMinRounds;
        params.alpha = alpha;
        params.rounds = spec.milp_horizon;
        MilpModel model = encode(input.instance, params);
        MilpSolution sol =
            solve_external(export_lp(model), spec.solver_cmd, spec.time_limit_s);
        switch (sol.status) {
          case MilpSolution::Status::kOptimal:
            row.feasible = true;
            row.rounds = static_cast<int>(std::lround(sol.objective));
            row.status = "ok";
            break;
          case MilpSolution::Status::kInfeasible:
            row.status = "infeasible";
            break;
          case MilpSolution::Status::kTimeout:
            row.status = "timeout";
            row.rounds = static_cast<int>(std::lround(sol.objective));
            break;
          case MilpSolution::Status::kError:
            row.status = "error";
            break;
        }
      } catch (const std::exception&) {
        row.status = "error";
      }
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start).count();
      rows.push_back(row);
    }
    return rows;
  }

  throw std::invalid_argument("unknown algorithm: " + algorithm);
}

}  // namespace

std::vector<SweepRow> run_sweep(const std::vector<SweepInput>& inputs, const SweepSpec& spec) {
  std::vector<double> grid = alpha_grid(spec);
  struct Cell {
    const SweepInput* input;
    std::string algorithm;
  };
  std::vector<Cell> cells;
  for (const SweepInput& input : inputs)
    for (const std::string& algorithm : spec.algorithms) cells.push_back({&input, algorithm});

  std::vector<std::vector<SweepRow>> results(cells.size());
  std::atomic<size_t> next{0};
  int jobs = std::max(1, spec.jobs);
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      try {
        results[i] = run_cell(*cells[i].input, cells[i].algorithm, spec, grid);
      } catch (const std::exception&) {
        // Row failures never abort the sweep.
        for (double alpha : grid) {
          SweepRow row;
          row.topology = cells[i].input->topology;
          row.seed = cells[i].input->seed;
          row.algorithm = cells[i].algorithm;
          row.alpha = alpha;
          row.status = "error";
          results[i].push_back(row);
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<SweepRow> rows;
  for (auto& cell_rows : results)
    for (auto& row : cell_rows) rows.push_back(std::move(row));
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.topology, a.seed, a.algorithm, a.alpha) <
           std::tie(b.topology, b.seed, b.algorithm, b.alpha);
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "topology,seed,algorithm,alpha,rounds,alpha_min,beta_min,feasible,status\n";
  for (const SweepRow& row : rows) {
    out << row.topology << "," << row.seed << "," << row.algorithm << ","
        << format_number(row.alpha) << "," << row.rounds << "," << format_number(row.alpha_min)
        << "," << format_number(row.beta_min) << "," << (row.feasible ? "1" : "0") << ","
        << row.status << "\n";
  }
  // Aggregates: mean rounds over feasible rows and feasibility fraction per
  // (algorithm, alpha).
  std::map<std::pair<std::string, double>, std::pair<std::vector<int>, int>> agg;
  std::map<std::pair<std::string, double>, int> total;
  for (const SweepRow& row : rows) {
    auto key = std::make_pair(row.algorithm, row.alpha);
    ++total[key];
    if (row.feasible) {
      agg[key].first.push_back(row.rounds);
      ++agg[key].second;
    } else {
      agg[key];
    }
  }
  for (const auto& [key, value] : agg) {
    const auto& [rounds, feasible_count] = value;
    double mean = 0.0;
    for (int r : rounds) mean += r;
    if (!rounds.empty()) mean /= static_cast<double>(rounds.size());
    double fraction = total[key] ? static_cast<double>(feasible_count) / total[key] : 0.0;
    out << "ALL,0," << key.first << "," << format_number(key.second) << ","
        << format_number(mean) << ",0,0," << format_number(fraction) << ",aggregate\n";
  }
  return out.str();
}

std::string sweep_timing_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "topology,seed,algorithm,alpha,wall_time_s\n";
  for (const SweepRow& row : rows)
    out << row.topology << "," << row.seed << "," << row.algorithm << ","
        << format_number(row.alpha) << "," << format_number(row.wall_time_s) << "\n";
  return out.str();
}

}  // namespace netupd

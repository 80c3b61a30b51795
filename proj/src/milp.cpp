#include "netupd/milp.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netupd/pairinfo.hpp"

namespace netupd {

namespace {

std::string key(const char* sym, int r, const char* ent, int idx, int pair) {
  std::ostringstream out;
  out << sym << "_r" << r << "_" << ent << idx << "_p" << pair;
  return out.str();
}

// Incoming edge of `v` on a path, or -1.
int in_edge_of(const Network& net, const std::vector<int>& path_edges, int v) {
  for (int e : path_edges)
    if (net.edge(e).second == v) return e;
  return -1;
}

struct PairGrid {
  const PairInfo* info;
  std::vector<int> updatable;  // nodes minus terminal
};

}  // namespace

int MilpModel::add_var(const std::string& name, VarKind kind, double lb, double ub) {
  int idx = static_cast<int>(vars_.size());
  vars_.push_back({name, kind, lb, ub});
  name_to_var_[name] = idx;
  return idx;
}

void MilpModel::add_constraint(MilpConstraint constraint) {
  constraints_.push_back(std::move(constraint));
}

int MilpModel::var_index(const std::string& name) const {
  auto it = name_to_var_.find(name);
  return it == name_to_var_.end() ? -1 : it->second;
}

MilpModel encode(const Instance& instance, const MilpParams& params) {
  const Network& net = instance.network;
  const int n = net.node_count();
  const int k = static_cast<int>(instance.pairs.size());
  const bool min_rounds = params.objective == MilpObjective::kMinRounds;

  if (params.alpha < 1.0) throw std::invalid_argument("alpha must be at least 1");
  if (params.beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  int R = params.rounds > 0 ? params.rounds : k * (n - 1);
  if (R < 1) throw std::invalid_argument("round horizon must be at least 1");
  if (min_rounds && R > k * (n - 1)) throw std::invalid_argument("horizon exceeds k*(n-1)");

  MilpModel model;
  model.params = params;
  model.horizon = R;
  auto infos = analyze_pairs(instance);

  int r_var = -1, alpha_var = -1, beta_var = -1;
  switch (params.objective) {
    case MilpObjective::kMinRounds:
      r_var = model.add_var("R", VarKind::kInteger, 1, R);
      model.objective().push_back({r_var, 1.0});
      break;
    case MilpObjective::kMinAlpha:
      alpha_var = model.add_var("alpha", VarKind::kContinuous, 1.0, 2.0);
      model.objective().push_back({alpha_var, 1.0});
      break;
    case MilpObjective::kMinBeta:
      beta_var = model.add_var("beta", VarKind::kContinuous, 0.0, net.cmax());
      model.objective().push_back({beta_var, 1.0});
      break;
  }

  std::vector<PairGrid> grids(k);
  // var lookup tables per pair
  struct Vars {
    std::unordered_map<long, int> x, lam, ups, o, y, g, f;
  };
  std::vector<Vars> vars(k);
  auto nk = [](int r, int idx) { return static_cast<long>(r) * 100000 + idx; };

  for (int p = 0; p < k; ++p) {
    const PairInfo& info = infos[p];
    grids[p].info = &info;
    for (int v : info.nodes)
      if (v != instance.pairs[p].terminal) grids[p].updatable.push_back(v);

    for (int r = 1; r <= R; ++r)
      for (int v : grids[p].updatable) {
        int idx = model.add_var(key("x", r, "n", v, p), VarKind::kBinary, 0, 1);
        vars[p].x[nk(r, v)] = idx;
        model.x_vars.push_back({idx, r, v, p});
      }
    for (int r = 1; r <= R; ++r)
      for (int v : info.nodes) {
        vars[p].lam[nk(r, v)] = model.add_var(key("lam", r, "n", v, p), VarKind::kBinary, 0, 1);
        vars[p].ups[nk(r, v)] = model.add_var(key("ups", r, "n", v, p), VarKind::kBinary, 0, 1);
        vars[p].o[nk(r, v)] = model.add_var(key("o", r, "n", v, p), VarKind::kInteger, 1, n);
      }
    for (int r = 0; r <= R; ++r)
      for (int e : info.edges)
        vars[p].y[nk(r, e)] = model.add_var(key("y", r, "e", e, p), VarKind::kBinary, 0, 1);
    for (int r = 1; r <= R; ++r)
      for (int e : info.edges) {
        vars[p].g[nk(r, e)] = model.add_var(key("g", r, "e", e, p), VarKind::kBinary, 0, 1);
        vars[p].f[nk(r, e)] = model.add_var(
            key("f", r, "e", e, p), params.binary_flows ? VarKind::kBinary : VarKind::kContinuous,
            0, 1);
      }
  }

  for (int p = 0; p < k; ++p) {
    const PairInfo& info = infos[p];
    const FlowPair& fp = instance.pairs[p];
    auto shared = [&](int e) {
      return std::binary_search(info.shared_edges.begin(), info.shared_edges.end(), e);
    };
    auto new_only = [&](int e) {
      return std::binary_search(info.new_only_edges.begin(), info.new_only_edges.end(), e);
    };

    // Every node of the pair except the terminal updates exactly once.
    for (int v : grids[p].updatable) {
      MilpConstraint c;
      c.name = "update_once_p" + std::to_string(p) + "_n" + std::to_string(v);
      for (int r = 1; r <= R; ++r) c.terms.push_back({vars[p].x[nk(r, v)], 1.0});
      c.sense = '=';
      c.rhs = 1.0;
      model.add_constraint(std::move(c));
    }
    // Round 0: exactly the old flow is active.
    for (int e : info.edges) {
      bool in_old = !new_only(e);
      MilpConstraint c;
      c.name = (in_old ? "init_old_p" : "init_new_p") + std::to_string(p) + "_e" + std::to_string(e);
      c.terms.push_back({vars[p].y[nk(0, e)], 1.0});
      c.sense = '=';
      c.rhs = in_old ? 1.0 : 0.0;
      model.add_constraint(std::move(c));
    }

    for (int r = 1; r <= R; ++r) {
      std::string rp = "_r" + std::to_string(r) + "_p" + std::to_string(p);
      if (min_rounds) {
        // The number of rounds dominates every update round actually used.
        for (int v : grids[p].updatable) {
          MilpConstraint c;
          c.name = "max_route" + rp + "_n" + std::to_string(v);
          c.terms.push_back({r_var, 1.0});
          c.terms.push_back({vars[p].x[nk(r, v)], -static_cast<double>(r)});
          c.sense = '>';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
      }
      for (int e : info.edges) {
        std::string re = rp + "_e" + std::to_string(e);
        int tail = net.edge(e).first;
        if (shared(e)) {
          MilpConstraint c;
          c.name = "remain_active" + re;
          c.terms.push_back({vars[p].y[nk(r, e)], 1.0});
          c.sense = '=';
          c.rhs = 1.0;
          model.add_constraint(std::move(c));
        } else if (new_only(e)) {
          // Active once the tail has updated.
          MilpConstraint c;
          c.name = "new_edge_act" + re;
          c.terms.push_back({vars[p].y[nk(r, e)], 1.0});
          for (int rr = 1; rr <= r; ++rr) c.terms.push_back({vars[p].x[nk(rr, tail)], -1.0});
          c.sense = '=';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        } else {
          // Old-only: active until the tail updates.
          MilpConstraint c;
          c.name = "old_edge_deact" + re;
          c.terms.push_back({vars[p].y[nk(r, e)], 1.0});
          for (int rr = 1; rr <= r; ++rr) c.terms.push_back({vars[p].x[nk(rr, tail)], 1.0});
          c.sense = '=';
          c.rhs = 1.0;
          model.add_constraint(std::move(c));
        }
        // Active during r := active after r-1 or after r (and only then).
        {
          MilpConstraint c;
          c.name = "trans_prev" + re;
          c.terms.push_back({vars[p].g[nk(r, e)], 1.0});
          c.terms.push_back({vars[p].y[nk(r - 1, e)], -1.0});
          c.sense = '>';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
        {
          MilpConstraint c;
          c.name = "trans_next" + re;
          c.terms.push_back({vars[p].g[nk(r, e)], 1.0});
          c.terms.push_back({vars[p].y[nk(r, e)], -1.0});
          c.sense = '>';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
        {
          MilpConstraint c;
          c.name = "trans_span" + re;
          c.terms.push_back({vars[p].g[nk(r, e)], 1.0});
          c.terms.push_back({vars[p].y[nk(r - 1, e)], -1.0});
          c.terms.push_back({vars[p].y[nk(r, e)], -1.0});
          c.sense = '<';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
        // Order the endpoints of every transiently active edge
        // (subtour-elimination style): (n-1)*g - o_w + o_v <= n-2.
        {
          auto [u, w] = net.edge(e);
          MilpConstraint c;
          c.name = "order" + re;
          c.terms.push_back({vars[p].g[nk(r, e)], static_cast<double>(n - 1)});
          c.terms.push_back({vars[p].o[nk(r, w)], -1.0});
          c.terms.push_back({vars[p].o[nk(r, u)], 1.0});
          c.sense = '<';
          c.rhs = static_cast<double>(n - 2);
          model.add_constraint(std::move(c));
        }
        // A flow can only use edges active during the round.
        {
          MilpConstraint c;
          c.name = "flow_active" + re;
          c.terms.push_back({vars[p].f[nk(r, e)], 1.0});
          c.terms.push_back({vars[p].g[nk(r, e)], -1.0});
          c.sense = '<';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
      }

      for (int v : info.nodes) {
        std::string rn = rp + "_n" + std::to_string(v);
        bool branch_capable = info.role.at(v) == NodeRole::kBranching;
        if (branch_capable) {
          MilpConstraint c;
          c.name = "fork" + rn;
          c.terms.push_back({vars[p].lam[nk(r, v)], 1.0});
          c.terms.push_back({vars[p].x[nk(r, v)], -1.0});
          c.sense = '=';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        } else {
          MilpConstraint c;
          c.name = "no_fork" + rn;
          c.terms.push_back({vars[p].lam[nk(r, v)], 1.0});
          c.sense = '=';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
        int ino = in_edge_of(net, info.old_edges, v);
        int inn = in_edge_of(net, info.new_edges, v);
        if (ino >= 0 && inn >= 0 && ino != inn) {
          MilpConstraint c1;
          c1.name = "join_old" + rn;
          c1.terms.push_back({vars[p].ups[nk(r, v)], 1.0});
          c1.terms.push_back({vars[p].f[nk(r, ino)], -1.0});
          c1.sense = '<';
          c1.rhs = 0.0;
          model.add_constraint(std::move(c1));
          MilpConstraint c2;
          c2.name = "join_new" + rn;
          c2.terms.push_back({vars[p].ups[nk(r, v)], 1.0});
          c2.terms.push_back({vars[p].f[nk(r, inn)], -1.0});
          c2.sense = '<';
          c2.rhs = 0.0;
          model.add_constraint(std::move(c2));
        } else {
          MilpConstraint c;
          c.name = "no_join" + rn;
          c.terms.push_back({vars[p].ups[nk(r, v)], 1.0});
          c.sense = '=';
          c.rhs = 0.0;
          model.add_constraint(std::move(c));
        }
      }

      // Unit source-terminal flow; a branching source (merging terminal)
      // temporarily emits (absorbs) one extra unit.
      {
        MilpConstraint c;
        c.name = "flow_source" + rp;
        for (int e : info.edges)
          if (net.edge(e).first == fp.source) c.terms.push_back({vars[p].f[nk(r, e)], 1.0});
        c.terms.push_back({vars[p].lam[nk(r, fp.source)], -1.0});
        c.sense = '=';
        c.rhs = 1.0;
        model.add_constraint(std::move(c));
      }
      {
        MilpConstraint c;
        c.name = "flow_sink" + rp;
        for (int e : info.edges)
          if (net.edge(e).second == fp.terminal) c.terms.push_back({vars[p].f[nk(r, e)], 1.0});
        c.terms.push_back({vars[p].ups[nk(r, fp.terminal)], -1.0});
        c.sense = '=';
        c.rhs = 1.0;
        model.add_constraint(std::move(c));
      }
      for (int v : info.nodes) {
        if (v == fp.source || v == fp.terminal) continue;
        MilpConstraint c;
        c.name = "flow_conserve" + rp + "_n" + std::to_string(v);
        for (int e : info.edges) {
          if (net.edge(e).first == v) c.terms.push_back({vars[p].f[nk(r, e)], 1.0});
          if (net.edge(e).second == v) c.terms.push_back({vars[p].f[nk(r, e)], -1.0});
        }
        c.terms.push_back({vars[p].lam[nk(r, v)], -1.0});
        c.terms.push_back({vars[p].ups[nk(r, v)], 1.0});
        c.sense = '=';
        c.rhs = 0.0;
        model.add_constraint(std::move(c));
      }

      // An old-only node keeps its rule until the in-both node heading its
      // segment has switched in an earlier round.
      for (int u : info.old_only_nodes) {
        int head = info.segment_head.at(u);
        MilpConstraint c;
        c.name = "removal_order" + rp + "_n" + std::to_string(u);
        for (int rr = 1; rr <= r; ++rr) c.terms.push_back({vars[p].x[nk(rr, u)], 1.0});
        for (int rr = 1; rr <= r - 1; ++rr) c.terms.push_back({vars[p].x[nk(rr, head)], -1.0});
        c.sense = '<';
        c.rhs = 0.0;
        model.add_constraint(std::move(c));
      }
    }
  }

  // Augmented capacity bounds the pairs' transient flows on every edge.
  for (int r = 1; r <= R; ++r) {
    for (int e = 0; e < net.edge_count(); ++e) {
      MilpConstraint c;
      c.name = "capacity_r" + std::to_string(r) + "_e" + std::to_string(e);
      for (int p = 0; p < k; ++p) {
        auto it = vars[p].f.find(nk(r, e));
        if (it != vars[p].f.end()) c.terms.push_back({it->second, instance.pairs[p].demand});
      }
      if (c.terms.empty()) continue;
      c.sense = '<';
      switch (params.objective) {
        case MilpObjective::kMinRounds:
          c.rhs = params.alpha * net.capacity(e) + params.beta;
          break;
        case MilpObjective::kMinAlpha:
          c.terms.push_back({alpha_var, -net.capacity(e)});
          c.rhs = params.beta;
          break;
        case MilpObjective::kMinBeta:
          c.terms.push_back({beta_var, -1.0});
          c.rhs = params.alpha * net.capacity(e);
          break;
      }
      model.add_constraint(std::move(c));
    }
  }
  return model;
}

long expected_constraint_count(const Instance& instance, const MilpParams& params) {
  const Network& net = instance.network;
  const int n = net.node_count();
  const int k = static_cast<int>(instance.pairs.size());
  int R = params.rounds > 0 ? params.rounds : k * (n - 1);
  auto infos = analyze_pairs(instance);

  long total = 0;
  std::vector<char> touched(net.edge_count(), 0);
  for (const PairInfo& info : infos) {
    long N = static_cast<long>(info.nodes.size());
    long U = N - 1;
    long E = static_cast<long>(info.edges.size());
    long M = 0;
    for (int v : info.nodes) {
      int ino = in_edge_of(net, info.old_edges, v);
      int inn = in_edge_of(net, info.new_edges, v);
      if (ino >= 0 && inn >= 0 && ino != inn) ++M;
    }
    long oo_nodes = static_cast<long>(info.old_only_nodes.size());
    long per_round = (params.objective == MilpObjective::kMinRounds ? U : 0) +
                     E +            // activity evolution (one per edge)
                     3 * E +        // trans_prev/next/span
                     E +            // order
                     E +            // flow_active
                     N +            // fork/no_fork
                     (N + M) +      // join pairs / no_join
                     2 +            // source + sink
                     (N - 2) +      // conservation
                     oo_nodes;      // removal order
    total += U + E + static_cast<long>(R) * per_round;
    for (int e : info.edges) touched[e] = 1;
  }
  long eu = std::count(touched.begin(), touched.end(), 1);
  total += static_cast<long>(R) * eu;
  return total;
}

std::string export_lp(const MilpModel& model) {
  std::ostringstream out;
  out << "\\ lp model: objective=";
  switch (model.params.objective) {
    case MilpObjective::kMinRounds:
      out << "rounds";
      break;
    case MilpObjective::kMinAlpha:
      out << "alpha";
      break;
    case MilpObjective::kMinBeta:
      out << "beta";
      break;
  }
  out << " horizon=" << model.horizon << " alpha=" << format_number(model.params.alpha)
      << " beta=" << format_number(model.params.beta) << "\n";

  auto write_terms = [&](const std::vector<MilpTerm>& terms) {
    bool first = true;
    for (const MilpTerm& t : terms) {
      double c = t.coef;
      if (first) {
        if (c < 0) out << "- ";
        first = false;
      } else {
        out << (c < 0 ? " - " : " + ");
      }
      double a = std::abs(c);
      if (a != 1.0) out << format_number(a) << " ";
      out << model.vars()[t.var].name;
    }
  };

  out << "Minimize\n obj: ";
  write_terms(model.objective_terms());
  out << "\nSubject To\n";
  for (const MilpConstraint& c : model.constraints()) {
    out << " " << c.name << ": ";
    write_terms(c.terms);
    out << (c.sense == '<' ? " <= " : c.sense == '>' ? " >= " : " = ") << format_number(c.rhs)
        << "\n";
  }
  out << "Bounds\n";
  for (const MilpVar& v : model.vars()) {
    if (v.kind == VarKind::kBinary) continue;
    out << " " << format_number(v.lb) << " <= " << v.name << " <= " << format_number(v.ub)
        << "\n";
  }
  bool any_general = false;
  for (const MilpVar& v : model.vars())
    if (v.kind == VarKind::kInteger) any_general = true;
  if (any_general) {
    out << "Generals\n";
    for (const MilpVar& v : model.vars())
      if (v.kind == VarKind::kInteger) out << " " << v.name << "\n";
  }
  out << "Binaries\n";
  for (const MilpVar& v : model.vars())
    if (v.kind == VarKind::kBinary) out << " " << v.name << "\n";
  out << "End\n";
  return out.str();
}

UpdateSchedule decode(const Instance& instance, const MilpModel& model,
                      const MilpSolution& solution) {
  if (solution.status != MilpSolution::Status::kOptimal)
    throw std::runtime_error("cannot decode a non-optimal solution: " + solution.detail);
  auto infos = analyze_pairs(instance);
  UpdateSchedule schedule = UpdateSchedule::empty_for(instance);
  for (const auto& xv : model.x_vars) {
    const std::string& name = model.vars()[xv.var].name;
    auto it = solution.values.find(name);
    double val = it == solution.values.end() ? 0.0 : it->second;
    if (val > 1e-6 && val < 1.0 - 1e-6)
      throw std::runtime_error("non-integral update variable " + name);
    if (val <= 0.5) continue;
    if (!infos[xv.pair].is_rule_changer(xv.node)) continue;  // no-op update
    auto& pr = schedule.rounds[xv.pair];
    if (static_cast<int>(pr.size()) < xv.round) pr.resize(xv.round);
    pr[xv.round - 1].push_back(xv.node);
  }
  schedule.normalize();
  return schedule;
}

MilpSolution solve_external(const std::string& lp_text, const std::string& solver_command,
                            double time_limit_s) {
  namespace fs = std::filesystem;
  MilpSolution sol;
  if (solver_command.empty()) {
    sol.detail = "no solver command configured";
    return sol;
  }

  static int counter = 0;
  std::string stem = "netupd_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  fs::path lp_path = fs::temp_directory_path() / (stem + ".lp");
  fs::path sol_path = fs::temp_directory_path() / (stem + ".sol");
  {
    std::ofstream lp(lp_path);
    lp << lp_text;
  }

  std::string cmd = solver_command;
  auto substitute = [&cmd](const std::string& token, const std::string& value) {
    bool seen = false;
    size_t pos;
    while ((pos = cmd.find(token)) != std::string::npos) {
      cmd.replace(pos, token.size(), value);
      seen = true;
    }
    return seen;
  };
  bool has_lp = substitute("{lp}", lp_path.string());
  bool has_sol = substitute("{sol}", sol_path.string());
  substitute("{timelimit}", format_number(time_limit_s));
  if (!has_lp) cmd += " " + lp_path.string();
  if (!has_sol) cmd += " " + sol_path.string();
  cmd += " 2>&1";

  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    sol.detail = "failed to launch solver";
    return sol;
  }
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, got);
  int rc = pclose(pipe);

  std::ifstream in(sol_path);
  if (!in) {
    sol.detail = "solver produced no solution file (exit " + std::to_string(rc) + "): " + output;
    fs::remove(lp_path);
    return sol;
  }
  std::string line;
  bool saw_status = false;
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    std::string t0 = lower(toks[0]);
    if (t0 == "status" && toks.size() >= 2) {
      saw_status = true;
      std::string s = lower(toks[1]);
      if (s.find("optimal") != std::string::npos)
        sol.status = MilpSolution::Status::kOptimal;
      else if (s.find("infeasible") != std::string::npos)
        sol.status = MilpSolution::Status::kInfeasible;
      else if (s.find("time") != std::string::npos)
        sol.status = MilpSolution::Status::kTimeout;
      else
        sol.detail = "unknown solver status: " + toks[1];
      continue;
    }
    if (t0 == "objective" && toks.size() >= 2) {
      double v;
      auto res = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), v);
      if (res.ec == std::errc()) sol.objective = v;
      continue;
    }
    // "name value" or "idx name value [...]" variable lines.
    auto try_number = [](const std::string& s, double& v) {
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };
    double v;
    if (toks.size() >= 2 && try_number(toks[1], v) && !try_number(toks[0], v)) {
      double value;
      try_number(toks[1], value);
      sol.values[toks[0]] = value;
    } else if (toks.size() >= 3 && try_number(toks[2], v)) {
      sol.values[toks[1]] = v;
    }
  }
  fs::remove(lp_path);
  fs::remove(sol_path);
  if (!saw_status) {
    std::string body = lower(output);
    if (body.find("infeasible") != std::string::npos)
      sol.status = MilpSolution::Status::kInfeasible;
    else if (!sol.values.empty())
      sol.status = MilpSolution::Status::kOptimal;
    else
      sol.detail = "solver output carried no status: " + output;
  }
  return sol;
}

}  // namespace netupd

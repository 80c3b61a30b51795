#include "netupd/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "netupd/checker.hpp"

namespace netupd {

namespace {

std::string var_name(int j) { return "x" + std::to_string(j); }

}  // namespace

Cnf3 Cnf3::from_clauses(int variable_count, std::vector<std::array<int, 3>> clauses) {
  if (variable_count < 1) throw SemanticError("formula needs at least one variable");
  Cnf3 cnf;
  cnf.variable_count = variable_count;
  for (const auto& clause : clauses) {
    bool tautology = false;
    for (int lit : clause) {
      if (lit == 0 || std::abs(lit) > variable_count)
        throw SemanticError("literal out of range in clause");
      for (int other : clause)
        if (lit == -other) tautology = true;
    }
    if (!tautology) cnf.clauses.push_back(clause);
  }
  return cnf;
}

Cnf3 Cnf3::parse_dimacs(const std::string& document) {
  std::istringstream in(document);
  std::string line;
  int vars = 0, expected_clauses = -1;
  std::vector<std::array<int, 3>> clauses;
  std::vector<int> pending;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      ls >> p >> fmt >> vars >> expected_clauses;
      if (fmt != "cnf") throw SemanticError("expected DIMACS 'p cnf' header");
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (pending.size() != 3) throw SemanticError("clause must have exactly 3 literals");
        clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      } else {
        pending.push_back(lit);
      }
    }
  }
  if (!pending.empty()) throw SemanticError("clause not terminated by 0");
  if (vars == 0) throw SemanticError("missing DIMACS header");
  return from_clauses(vars, std::move(clauses));
}

bool Cnf3::satisfies(const std::vector<bool>& assignment, int clause) const {
  for (int lit : clauses[clause]) {
    int j = std::abs(lit) - 1;
    if ((lit > 0) == static_cast<bool>(assignment[j])) return true;
  }
  return false;
}

bool Cnf3::satisfies(const std::vector<bool>& assignment) const {
  for (size_t i = 0; i < clauses.size(); ++i)
    if (!satisfies(assignment, static_cast<int>(i))) return false;
  return true;
}

GadgetParams GadgetParams::multiplicative(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0))
    throw std::invalid_argument("multiplicative variant needs 0 < epsilon < 1/3");
  GadgetParams p;
  p.epsilon = epsilon;
  p.additive = false;
  p.sqrt_a = static_cast<int>(std::floor(1.0 / (2.0 * epsilon))) + 1;
  p.a = static_cast<long>(p.sqrt_a) * p.sqrt_a;
  return p;
}

GadgetParams GadgetParams::additive_variant(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("additive variant needs 0 < epsilon < 1");
  GadgetParams p;
  p.epsilon = epsilon;
  p.additive = true;
  p.sqrt_a = 0;
  p.a = 0;
  return p;
}

double GadgetInstance::target_alpha() const {
  return params.additive ? 1.0 : 2.0 - params.epsilon;
}

double GadgetInstance::target_beta() const {
  return params.additive ? instance.network.cmax() / 3.0 - params.epsilon : 0.0;
}

namespace {

struct GadgetNames {
  static std::string w1(int j) { return "w1_" + var_name(j); }
  static std::string w2(int j) { return "w2_" + var_name(j); }
  static std::string wk(int j, int k) { return "w_" + var_name(j) + "_k" + std::to_string(k); }
  static std::string u(int i) { return "u_c" + std::to_string(i); }
  static std::string v(int i) { return "v_c" + std::to_string(i); }
  static std::string u_occ(int i, int slot) {
    return "u_c" + std::to_string(i) + "_s" + std::to_string(slot);
  }
  static std::string v_occ(int i, int slot) {
    return "v_c" + std::to_string(i) + "_s" + std::to_string(slot);
  }
  static std::string relay(int j, bool positive) {
    return std::string("r_") + (positive ? "pos_" : "neg_") + var_name(j);
  }
};

class GadgetBuilder {
 public:
  explicit GadgetBuilder(bool additive) : additive_(additive) {}

  void internal_edge(const std::string& a, const std::string& b, double cap) {
    nodes_.insert(a);
    nodes_.insert(b);
    auto [it, inserted] = cap_.try_emplace({a, b}, cap);
    if (!inserted && it->second != cap)
      throw std::logic_error("conflicting capacities for internal edge");
  }

  int add_pair(double demand, std::vector<std::string> old_path,
               std::vector<std::string> new_path) {
    for (const auto& path : {old_path, new_path}) {
      for (size_t i = 0; i + 1 < path.size(); ++i) {
        nodes_.insert(path[i]);
        nodes_.insert(path[i + 1]);
        if (!cap_.count({path[i], path[i + 1]})) connectors_.insert({path[i], path[i + 1]});
      }
    }
    pairs_.push_back({demand, std::move(old_path), std::move(new_path)});
    return static_cast<int>(pairs_.size()) - 1;
  }

  Instance finish() {
    // Connector capacity: room for every flow assigned to it (the additive
    // variant pins connectors at 3 instead).
    for (const auto& edge : connectors_) {
      double cap = 0.0;
      if (additive_) {
        cap = 3.0;
      } else {
        for (const auto& pr : pairs_) {
          bool used = false;
          for (const auto* path : {&pr.old_path, &pr.new_path}) {
            for (size_t i = 0; i + 1 < path->size(); ++i)
              if ((*path)[i] == edge.first && (*path)[i + 1] == edge.second) used = true;
          }
          if (used) cap += pr.demand;
        }
      }
      cap_[edge] = cap;
    }
    std::vector<std::string> node_list(nodes_.begin(), nodes_.end());
    std::vector<std::tuple<std::string, std::string, double>> edge_list;
    for (const auto& [edge, cap] : cap_) edge_list.emplace_back(edge.first, edge.second, cap);

    Instance instance;
    instance.network = Network(node_list, edge_list);
    long id = 0;
    for (const auto& pr : pairs_) {
      FlowPair fp;
      fp.id = id++;
      fp.demand = pr.demand;
      for (const std::string& n : pr.old_path) fp.old_path.push_back(instance.network.node_index(n));
      for (const std::string& n : pr.new_path) fp.new_path.push_back(instance.network.node_index(n));
      fp.source = fp.old_path.front();
      fp.terminal = fp.old_path.back();
      instance.pairs.push_back(std::move(fp));
    }
    return instance;
  }

 private:
  struct RawPair {
    double demand;
    std::vector<std::string> old_path, new_path;
  };
  bool additive_;
  std::set<std::string> nodes_;
  std::map<std::pair<std::string, std::string>, double> cap_;
  std::set<std::pair<std::string, std::string>> connectors_;
  std::vector<RawPair> pairs_;
};

// Occurrences of variable j with the given polarity, ascending (clause, slot).
std::vector<std::pair<int, int>> occurrences(const Cnf3& cnf, int j, bool positive) {
  std::vector<std::pair<int, int>> out;
  for (size_t i = 0; i < cnf.clauses.size(); ++i)
    for (int slot = 0; slot < 3; ++slot) {
      int lit = cnf.clauses[i][slot];
      if (std::abs(lit) == j && (lit > 0) == positive)
        out.emplace_back(static_cast<int>(i) + 1, slot);
    }
  return out;
}

// The truth flow's route through variable gadget j: its polarity's
// occurrence edges, or a relay path when the polarity never occurs.
std::vector<std::string> polarity_route(const Cnf3& cnf, int j, bool positive) {
  std::vector<std::string> inside{GadgetNames::w1(j)};
  auto occ = occurrences(cnf, j, positive);
  if (occ.empty()) {
    inside.push_back(GadgetNames::relay(j, positive));
  } else {
    for (auto [i, slot] : occ) {
      inside.push_back(GadgetNames::u_occ(i, slot));
      inside.push_back(GadgetNames::v_occ(i, slot));
    }
  }
  inside.push_back(GadgetNames::w2(j));
  return inside;
}

// Concatenates per-gadget segments into one s->t route.
std::vector<std::string> thread_variables(
    int variable_count, const std::function<std::vector<std::string>(int)>& inside) {
  std::vector<std::string> path{"s"};
  for (int j = 1; j <= variable_count; ++j) {
    auto seg = inside(j);
    path.insert(path.end(), seg.begin(), seg.end());
  }
  path.push_back("t");
  return path;
}

GadgetInstance build_gadget(const Cnf3& cnf, const GadgetParams& params) {
  if (cnf.clauses.empty())
    throw SemanticError("formula has no clauses after dropping tautologies");
  const int J = cnf.variable_count;
  const int C = static_cast<int>(cnf.clauses.size());
  const int sa = params.sqrt_a;
  const double a = params.additive ? 1.0 : static_cast<double>(params.a);
  auto ladder_cap = [&](int k) {
    return params.additive ? 2.0 : static_cast<double>(params.a + params.a + k * params.sqrt_a);
  };
  const double lit_cap = params.additive ? 1.0 : a;
  const double spine_cap = params.additive ? 3.0 : 3.0 * a;

  GadgetBuilder builder(params.additive);

  // Internal edges with pinned capacities.
  for (int j = 1; j <= J; ++j) {
    for (bool positive : {true, false}) {
      auto route = polarity_route(cnf, j, positive);
      for (size_t i = 0; i + 1 < route.size(); ++i)
        builder.internal_edge(route[i], route[i + 1], lit_cap);
    }
    for (int k = 0; k <= sa; ++k) {
      builder.internal_edge(GadgetNames::w1(j), GadgetNames::wk(j, k), ladder_cap(k));
      builder.internal_edge(GadgetNames::wk(j, k), GadgetNames::w2(j), ladder_cap(k));
    }
  }
  for (int i = 1; i <= C; ++i) {
    builder.internal_edge(GadgetNames::u(i), GadgetNames::v(i), spine_cap);
    for (int slot = 0; slot < 3; ++slot) {
      builder.internal_edge(GadgetNames::u(i), GadgetNames::u_occ(i, slot), lit_cap);
      builder.internal_edge(GadgetNames::v_occ(i, slot), GadgetNames::v(i), lit_cap);
    }
  }

  GadgetInstance gadget;
  gadget.params = params;
  gadget.cnf = cnf;

  auto ladder_inside = [&](int k) {
    return [&, k](int j) {
      return std::vector<std::string>{GadgetNames::w1(j), GadgetNames::wk(j, k),
                                      GadgetNames::w2(j)};
    };
  };

  // Truth flows: old route over their polarity's occurrence edges, updated
  // route over the level-0 ladder path.
  gadget.true_pair = builder.add_pair(
      params.additive ? 1.0 : a,
      thread_variables(J, [&](int j) { return polarity_route(cnf, j, true); }),
      thread_variables(J, ladder_inside(0)));
  gadget.false_pair = builder.add_pair(
      params.additive ? 1.0 : a,
      thread_variables(J, [&](int j) { return polarity_route(cnf, j, false); }),
      thread_variables(J, ladder_inside(0)));

  // Ladder flows F(k) shift one level up; the top one is the blocking flow
  // and its update crosses every clause gadget in reverse clause order.
  std::vector<std::string> blocking_new{"s", "b_in"};
  for (int i = C; i >= 1; --i) {
    blocking_new.push_back(GadgetNames::u(i));
    blocking_new.push_back(GadgetNames::v(i));
  }
  blocking_new.push_back("b_out");
  blocking_new.push_back("t");

  for (int k = 0; k <= sa; ++k) {
    double demand = params.additive ? 1.0 : static_cast<double>(ladder_cap(k));
    std::vector<std::string> old_path = thread_variables(J, ladder_inside(k));
    std::vector<std::string> new_path =
        k < sa ? thread_variables(J, ladder_inside(k + 1)) : blocking_new;
    gadget.ladder_pairs.push_back(builder.add_pair(demand, std::move(old_path), std::move(new_path)));
  }
  gadget.blocking_pair = gadget.ladder_pairs.back();

  // Clause flows: initially identical spine routes; each updates onto the
  // detour of one literal slot per clause.
  for (int slot = 0; slot < 3; ++slot) {
    std::vector<std::string> old_path{"s"}, new_path{"s"};
    for (int i = 1; i <= C; ++i) {
      old_path.push_back(GadgetNames::u(i));
      old_path.push_back(GadgetNames::v(i));
      new_path.push_back(GadgetNames::u(i));
      new_path.push_back(GadgetNames::u_occ(i, slot));
      new_path.push_back(GadgetNames::v_occ(i, slot));
      new_path.push_back(GadgetNames::v(i));
    }
    old_path.push_back("t");
    new_path.push_back("t");
    gadget.clause_flow_pairs[slot] =
        builder.add_pair(params.additive ? 1.0 : a, std::move(old_path), std::move(new_path));
  }

  gadget.instance = builder.finish();
  auto violations = validate_instance(gadget.instance);
  if (!violations.empty())
    throw std::logic_error("gadget construction produced an invalid instance: " + violations.front());
  return gadget;
}

}  // namespace

GadgetInstance build_multiplicative(const Cnf3& cnf, double epsilon) {
  return build_gadget(cnf, GadgetParams::multiplicative(epsilon));
}

GadgetInstance build_additive(const Cnf3& cnf, double epsilon) {
  return build_gadget(cnf, GadgetParams::additive_variant(epsilon));
}

UpdateSchedule schedule_from_assignment(const GadgetInstance& gadget,
                                        const std::vector<bool>& assignment) {
  const Cnf3& cnf = gadget.cnf;
  if (static_cast<int>(assignment.size()) != cnf.variable_count)
    throw std::invalid_argument("assignment size does not match variable count");
  for (size_t i = 0; i < cnf.clauses.size(); ++i)
    if (!cnf.satisfies(assignment, static_cast<int>(i)))
      throw SemanticError("assignment does not satisfy clause " + std::to_string(i + 1));

  const Network& net = gadget.instance.network;
  const int J = cnf.variable_count;
  const int C = static_cast<int>(cnf.clauses.size());
  const int sa = gadget.params.sqrt_a;
  const int R = gadget.proof_rounds();

  UpdateSchedule schedule = UpdateSchedule::empty_for(gadget.instance);
  for (auto& pr : schedule.rounds) pr.resize(R);
  auto put = [&](int pair, int round, const std::string& node) {
    int v = net.node_index(node);
    if (v < 0) throw std::logic_error("unknown gadget node " + node);
    schedule.rounds[pair][round - 1].push_back(v);
  };

  auto occurrence_interior = [&](int j, bool positive) {
    std::vector<std::string> nodes;
    auto route = polarity_route(cnf, j, positive);
    nodes.assign(route.begin() + 1, route.end() - 1);  // drop w1/w2
    return nodes;
  };

  // Round 1: in each variable gadget, switch the truth flow the assignment
  // picks. Round sqrt_a+4 completes the other one; interiors of a vacated
  // route go one round after their head.
  for (int j = 1; j <= J; ++j) {
    bool value = assignment[j - 1];
    int chosen = value ? gadget.true_pair : gadget.false_pair;
    int other = value ? gadget.false_pair : gadget.true_pair;
    put(chosen, 1, GadgetNames::w1(j));
    put(chosen, 1, GadgetNames::wk(j, 0));
    for (const auto& n : occurrence_interior(j, value)) put(chosen, sa + 4, n);
    put(other, sa + 4, GadgetNames::w1(j));
    put(other, sa + 4, GadgetNames::wk(j, 0));
    for (const auto& n : occurrence_interior(j, !value)) put(other, sa + 5, n);
  }

  // Round 2: per clause, move the flow of one satisfied literal onto its
  // freed detour; the remaining two complete in the last round.
  for (int i = 1; i <= C; ++i) {
    int sat_slot = -1;
    for (int slot = 0; slot < 3; ++slot) {
      int lit = cnf.clauses[i - 1][slot];
      if ((lit > 0) == static_cast<bool>(assignment[std::abs(lit) - 1])) {
        sat_slot = slot;
        break;
      }
    }
    for (int slot = 0; slot < 3; ++slot) {
      int round = slot == sat_slot ? 2 : sa + 5;
      int pair = gadget.clause_flow_pairs[slot];
      put(pair, round, GadgetNames::u(i));
      put(pair, round, GadgetNames::u_occ(i, slot));
      put(pair, round, GadgetNames::v_occ(i, slot));
    }
  }

  // Round 3: the blocking flow leaves the variable gadgets for the clause
  // spines; its abandoned route is cleaned up in round sqrt_a+4.
  put(gadget.blocking_pair, 3, "s");
  put(gadget.blocking_pair, 3, "b_in");
  put(gadget.blocking_pair, 3, "b_out");
  for (int i = 1; i <= C; ++i) {
    put(gadget.blocking_pair, 3, GadgetNames::u(i));
    put(gadget.blocking_pair, 3, GadgetNames::v(i));
  }
  for (int j = 1; j <= J; ++j) {
    put(gadget.blocking_pair, sa + 4, GadgetNames::w1(j));
    put(gadget.blocking_pair, sa + 4, GadgetNames::wk(j, sa));
    put(gadget.blocking_pair, sa + 4, GadgetNames::w2(j));
  }

  // Rounds 4..sqrt_a+3: the ladder cascade, one flow per round, each moving
  // into the level vacated in the previous round.
  for (int m = 1; m <= sa; ++m) {
    int k = sa - m;
    int pair = gadget.ladder_pairs[k];
    for (int j = 1; j <= J; ++j) {
      put(pair, 3 + m, GadgetNames::w1(j));
      put(pair, 3 + m, GadgetNames::wk(j, k + 1));
      put(pair, sa + 4, GadgetNames::wk(j, k));
    }
  }

  schedule.normalize();
  return schedule;
}

std::vector<bool> assignment_from_schedule(const GadgetInstance& gadget,
                                           const UpdateSchedule& schedule) {
  const Network& net = gadget.instance.network;
  AugmentationReport report = assess(gadget.instance, schedule);
  if (!report.valid(gadget.target_alpha(), gadget.target_beta(), net))
    throw SemanticError("schedule is not valid at the gadget's augmentation level");

  auto global_round = [&](int pair, const std::string& node) {
    int v = net.node_index(node);
    int local = v < 0 ? 0 : schedule.local_round_of(pair, v);
    return local == 0 ? 0 : schedule.start_offset[pair] + local;
  };

  int blocking_round = global_round(gadget.blocking_pair, "s");
  if (blocking_round == 0) throw SemanticError("blocking flow never updated");

  std::vector<bool> assignment(gadget.cnf.variable_count, false);
  for (int j = 1; j <= gadget.cnf.variable_count; ++j) {
    int rt = global_round(gadget.true_pair, GadgetNames::w1(j));
    int rf = global_round(gadget.false_pair, GadgetNames::w1(j));
    bool true_early = rt != 0 && rt < blocking_round;
    bool false_early = rf != 0 && rf < blocking_round;
    if (true_early && false_early)
      assignment[j - 1] = rt <= rf;
    else
      assignment[j - 1] = true_early;
  }
  for (size_t i = 0; i < gadget.cnf.clauses.size(); ++i)
    if (!gadget.cnf.satisfies(assignment, static_cast<int>(i)))
      throw SemanticError("extracted assignment fails clause " + std::to_string(i + 1));
  return assignment;
}

std::string write_role_map(const GadgetInstance& gadget) {
  std::ostringstream out;
  out << "rolemap\n";
  out << "variant " << (gadget.params.additive ? "add" : "mult") << "\n";
  out << "epsilon " << format_number(gadget.params.epsilon) << "\n";
  out << "a " << gadget.params.a << "\n";
  out << "sqrt_a " << gadget.params.sqrt_a << "\n";
  out << "variables " << gadget.cnf.variable_count << "\n";
  out << "clauses " << gadget.cnf.clauses.size() << "\n";
  for (size_t i = 0; i < gadget.cnf.clauses.size(); ++i) {
    out << "clause " << (i + 1) << " literals";
    for (int lit : gadget.cnf.clauses[i]) out << " " << lit;
    out << "\n";
  }
  out << "pair " << gadget.true_pair << " true_flow\n";
  out << "pair " << gadget.false_pair << " false_flow\n";
  for (size_t k = 0; k < gadget.ladder_pairs.size(); ++k) {
    out << "pair " << gadget.ladder_pairs[k] << " ladder " << k;
    if (static_cast<int>(k) == gadget.params.sqrt_a) out << " blocking";
    out << "\n";
  }
  for (int slot = 0; slot < 3; ++slot)
    out << "pair " << gadget.clause_flow_pairs[slot] << " clause_flow " << slot << "\n";
  return out.str();
}

}  // namespace netupd

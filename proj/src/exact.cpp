#include "netupd/exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace netupd {

namespace {

// Per-pair search state. Only in-both branching nodes are free choices: a
// new-only node activates in the round its segment head switches, and an
// old-only node drops its rule one round later (earlier is invalid, later is
// never better: the segment is unreachable once the head switched).
struct PairState {
  const PairInfo* info = nullptr;
  const FlowPair* pair = nullptr;
  std::vector<int> branching;                // fixed order
  std::vector<int> round_of;                 // parallel to branching; 0 = unassigned
  std::vector<std::vector<int>> old_deps;    // old-only nodes headed by branching[i]
  std::vector<std::vector<int>> new_deps;    // new-only nodes headed by branching[i]
  std::unordered_map<int, int> branch_index; // node -> index into branching
  int identical_prev = -1;                   // symmetry partner or -1

  int assigned_count = 0;
  bool trivial() const { return branching.empty(); }
  bool done() const { return assigned_count == static_cast<int>(branching.size()); }

  // Round in which `node` updates under the current partial assignment;
  // 0 means "not yet / never".
  int node_round(int node) const {
    auto it = branch_index.find(node);
    if (it != branch_index.end()) return round_of[it->second];
    auto role = info->role.at(node);
    if (role == NodeRole::kNewOnly) {
      int h = branch_index.at(info->segment_head.at(node));
      return round_of[h];
    }
    if (role == NodeRole::kOldOnly) {
      int h = branch_index.at(info->segment_head.at(node));
      return round_of[h] == 0 ? 0 : round_of[h] + 1;
    }
    return 0;
  }
};

std::unordered_set<int> reach_over(const Network& net, const std::vector<int>& edges, int start,
                                   bool forward) {
  std::unordered_map<int, std::vector<int>> adj;
  for (int e : edges) {
    auto [u, v] = net.edge(e);
    if (forward)
      adj[u].push_back(v);
    else
      adj[v].push_back(u);
  }
  std::unordered_set<int> seen{start};
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : adj[v])
      if (seen.insert(w).second) queue.push_back(w);
  }
  return seen;
}

bool has_cycle(const Network& net, const std::vector<int>& edges) {
  std::unordered_map<int, std::vector<int>> adj;
  std::unordered_map<int, int> indeg;
  std::unordered_set<int> nodes;
  for (int e : edges) {
    auto [u, v] = net.edge(e);
    adj[u].push_back(v);
    ++indeg[v];
    nodes.insert(u);
    nodes.insert(v);
  }
  std::deque<int> queue;
  for (int v : nodes)
    if (!indeg.count(v)) queue.push_back(v);
  size_t removed = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    ++removed;
    for (int w : adj[v])
      if (--indeg[w] == 0) queue.push_back(w);
  }
  return removed != nodes.size();
}

class ExactSearch {
 public:
  enum class Mode { kMinRounds, kMinAlpha, kMinBeta };

  ExactSearch(const Instance& instance, const SearchBudget& budget)
      : instance_(instance), net_(instance.network), budget_(budget), infos_(analyze_pairs(instance)) {
    if (static_cast<int>(instance.pairs.size()) > budget.max_pairs)
      throw BudgetExceeded("pair count exceeds budget");
    states_.reserve(infos_.size());
    for (size_t p = 0; p < infos_.size(); ++p) {
      const PairInfo& info = infos_[p];
      if (static_cast<int>(info.rule_changers.size()) > budget.max_nodes_per_pair)
        throw BudgetExceeded("rule-changing node count exceeds budget");
      PairState st;
      st.info = &info;
      st.pair = &instance.pairs[p];
      st.branching = info.branching_nodes;
      st.round_of.assign(st.branching.size(), 0);
      st.old_deps.resize(st.branching.size());
      st.new_deps.resize(st.branching.size());
      for (size_t i = 0; i < st.branching.size(); ++i) st.branch_index[st.branching[i]] = static_cast<int>(i);
      for (int u : info.old_only_nodes)
        st.old_deps[st.branch_index.at(info.segment_head.at(u))].push_back(u);
      for (int w : info.new_only_nodes)
        st.new_deps[st.branch_index.at(info.segment_head.at(w))].push_back(w);
      states_.push_back(std::move(st));
    }
    for (size_t q = 0; q < states_.size(); ++q) {
      for (size_t p = 0; p < q; ++p) {
        if (instance.pairs[p].old_path == instance.pairs[q].old_path &&
            instance.pairs[p].new_path == instance.pairs[q].new_path &&
            std::abs(instance.pairs[p].demand - instance.pairs[q].demand) <= kLoadTolerance) {
          states_[q].identical_prev = static_cast<int>(p);
        }
      }
    }
    eval_cache_.resize(states_.size());
    deadline_ = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget.timeout);
  }

  // Feasibility at fixed horizon with a capacity bound (min-rounds probe).
  bool feasible(int horizon, double alpha, double beta, UpdateSchedule* witness) {
    mode_ = Mode::kMinRounds;
    alpha_ = alpha;
    beta_ = beta;
    horizon_ = horizon;
    found_ = false;
    best_objective_ = 0;
    reset_assignment();
    failed_states_.clear();
    if (all_done()) {  // nothing to update at all
      if (witness) *witness = build_schedule();
      return true;
    }
    dfs_round(1, 0.0, 0.0);
    if (found_ && witness) *witness = best_witness_;
    return found_;
  }

  // Minimum alpha_min (or beta_min) over loop-free schedules of `horizon`
  // rounds; exhaustive with branch-and-bound.
  std::optional<double> minimize_augmentation(int horizon, Mode mode, UpdateSchedule* witness) {
    mode_ = mode;
    alpha_ = std::numeric_limits<double>::infinity();
    beta_ = std::numeric_limits<double>::infinity();
    horizon_ = horizon;
    found_ = false;
    best_objective_ = std::numeric_limits<double>::infinity();
    reset_assignment();
    if (all_done()) {
      best_objective_ = mode == Mode::kMinAlpha ? 1.0 : 0.0;
      if (witness) *witness = build_schedule();
      return best_objective_;
    }
    dfs_round(1, 0.0, 0.0);
    if (!found_) return std::nullopt;
    if (witness) *witness = best_witness_;
    return best_objective_;
  }

 private:
  void reset_assignment() {
    for (auto& st : states_) {
      std::fill(st.round_of.begin(), st.round_of.end(), 0);
      st.assigned_count = 0;
    }
  }

  bool all_done() const {
    for (const auto& st : states_)
      if (!st.done()) return false;
    return true;
  }

  void tick() {
    if ((++nodes_ & 0x3ff) == 0 && std::chrono::steady_clock::now() > deadline_)
      throw BudgetExceeded("search timeout");
  }

  // Transient edge set of pair p during `round` under the current partial
  // assignment (rounds > current depth read as unassigned, which is exact).
  std::vector<int> during_set(const PairState& st, int round) const {
    std::vector<int> out;
    const PairInfo& info = *st.info;
    out.reserve(info.edges.size());
    for (int e : info.edges) {
      int tail = net_.edge(e).first;
      bool shared = std::binary_search(info.shared_edges.begin(), info.shared_edges.end(), e);
      bool is_new = std::binary_search(info.new_only_edges.begin(), info.new_only_edges.end(), e);
      bool active;
      if (shared) {
        active = true;
      } else if (is_new) {
        int r = st.node_round(tail);
        active = r != 0 && r <= round;
      } else {
        int r = st.node_round(tail);
        active = r == 0 || r > round - 1;
      }
      if (active) out.push_back(e);
    }
    return out;
  }

  // Loads contributed by pair p during `round` (reachability-filtered), or
  // nullptr when the transient digraph has a cycle. The result depends on
  // the assignment only through per-branching-node categories relative to
  // `round`, so evaluations are cached per pair.
  struct PairEval {
    bool loop_free = false;
    std::vector<int> loaded;
  };

  const PairEval* loaded_edges(size_t pi, int round) {
    PairState& st = states_[pi];
    uint64_t key = 0;
    bool cacheable = st.branching.size() <= 30;
    if (cacheable) {
      for (size_t i = 0; i < st.branching.size(); ++i) {
        int r = st.round_of[i];
        uint64_t cat = r == 0 ? 0 : r == round ? 1 : r == round - 1 ? 2 : 3;
        key = key << 2 | cat;
      }
      auto it = eval_cache_[pi].find(key);
      if (it != eval_cache_[pi].end()) return it->second.loop_free ? &it->second : nullptr;
    }
    PairEval eval;
    std::vector<int> during = during_set(st, round);
    if (!has_cycle(net_, during)) {
      eval.loop_free = true;
      auto reach = reach_over(net_, during, st.pair->source, true);
      auto coreach = reach_over(net_, during, st.pair->terminal, false);
      for (int e : during) {
        auto [u, v] = net_.edge(e);
        if (reach.count(u) && coreach.count(v)) eval.loaded.push_back(e);
      }
    }
    if (!cacheable) {
      scratch_eval_ = std::move(eval);
      return scratch_eval_.loop_free ? &scratch_eval_ : nullptr;
    }
    auto [it, inserted] = eval_cache_[pi].emplace(key, std::move(eval));
    return it->second.loop_free ? &it->second : nullptr;
  }

  UpdateSchedule build_schedule() const {
    UpdateSchedule s = UpdateSchedule::empty_for(instance_);
    for (size_t p = 0; p < states_.size(); ++p) {
      const PairState& st = states_[p];
      int maxr = 0;
      for (int v : st.info->rule_changers) maxr = std::max(maxr, st.node_round(v));
      s.rounds[p].resize(maxr);
      for (int v : st.info->rule_changers) {
        int r = st.node_round(v);
        if (r > 0) s.rounds[p][r - 1].push_back(v);
      }
    }
    s.normalize();
    return s;
  }

  // Completion horizon of the current (full) assignment: latest update
  // round, including implied old-only removals.
  int completion_round() const {
    int h = 0;
    for (const auto& st : states_)
      for (size_t i = 0; i < st.branching.size(); ++i)
        h = std::max(h, st.round_of[i] + (st.old_deps[i].empty() ? 0 : 1));
    return h;
  }

  // Chooses update sets for pairs[pi..] in `round`, then validates the round
  // and recurses. `acc_alpha`/`acc_beta` carry the worst ratio/excess seen in
  // validated rounds so far (branch-and-bound in augmentation modes).
  bool choose_pair(size_t pi, int round, bool progress, std::vector<double>& load,
                   std::vector<int>& touched, double acc_alpha, double acc_beta) {
    tick();
    if (pi == states_.size()) {
      if (!progress) return false;  // a globally idle round is never needed
      return validate_and_recurse(round, load, touched, acc_alpha, acc_beta);
    }
    PairState& st = states_[pi];
    std::vector<int> avail;
    for (size_t i = 0; i < st.branching.size(); ++i)
      if (st.round_of[i] == 0) avail.push_back(static_cast<int>(i));

    bool symmetric_blocked =
        st.identical_prev >= 0 && states_[st.identical_prev].assigned_count == 0;

    // Implied old-only removals from heads switched in the previous round
    // count as progress in this round.
    bool removal_here = false;
    for (size_t i = 0; i < st.branching.size() && !removal_here; ++i)
      removal_here = st.round_of[i] == round - 1 && !st.old_deps[i].empty();

    size_t nsub = size_t{1} << avail.size();
    for (size_t mask = 0; mask < nsub; ++mask) {
      if (mask != 0 && symmetric_blocked) break;  // canonical order for identical pairs
      bool ok = true;
      int chosen = 0;
      for (size_t bit = 0; bit < avail.size() && ok; ++bit) {
        if (!(mask & (size_t{1} << bit))) continue;
        int bi = avail[bit];
        // A head with old-only dependents needs one later round for their
        // removal.
        if (round == horizon_ && !st.old_deps[bi].empty()) ok = false;
        ++chosen;
      }
      if (!ok) continue;
      for (size_t bit = 0; bit < avail.size(); ++bit)
        if (mask & (size_t{1} << bit)) st.round_of[avail[bit]] = round;
      st.assigned_count += chosen;

      size_t touched_mark = touched.size();
      bool pair_ok = true;
      const PairEval* eval = loaded_edges(pi, round);
      std::vector<int> added;
      if (!eval) {
        pair_ok = false;  // transient loop
      } else {
        added = eval->loaded;
        for (int e : added) {
          if (load[e] == 0.0) touched.push_back(e);
          load[e] += st.pair->demand;
          if (load[e] > alpha_ * net_.capacity(e) + beta_ + kLoadTolerance) pair_ok = false;
        }
      }
      if (pair_ok &&
          choose_pair(pi + 1, round, progress || chosen > 0 || removal_here, load, touched,
                      acc_alpha, acc_beta))
        return true;

      // Undo.
      for (int e : added) load[e] -= st.pair->demand;
      while (touched.size() > touched_mark) {
        load[touched.back()] = 0.0;
        touched.pop_back();
      }
      for (size_t bit = 0; bit < avail.size(); ++bit)
        if (mask & (size_t{1} << bit)) st.round_of[avail[bit]] = 0;
      st.assigned_count -= chosen;
    }
    return false;
  }

  bool validate_and_recurse(int round, std::vector<double>& load, std::vector<int>& touched,
                            double acc_alpha, double acc_beta) {
    double round_alpha = 1.0, round_beta = 0.0;
    for (int e : touched) {
      round_alpha = std::max(round_alpha, load[e] / net_.capacity(e));
      round_beta = std::max(round_beta, load[e] - net_.capacity(e));
    }
    double new_acc_alpha = std::max(acc_alpha, round_alpha);
    double new_acc_beta = std::max(acc_beta, round_beta);
    if (mode_ == Mode::kMinAlpha && new_acc_alpha >= best_objective_ - 1e-12) return false;
    if (mode_ == Mode::kMinBeta && new_acc_beta >= best_objective_ - 1e-12 && found_) return false;

    if (all_done()) {
      if (completion_round() > horizon_) return false;
      found_ = true;
      if (mode_ == Mode::kMinRounds) {
        best_witness_ = build_schedule();
        return true;  // first completion wins (existence probe)
      }
      double objective = mode_ == Mode::kMinAlpha ? std::max(new_acc_alpha, 1.0)
                                                  : std::max(new_acc_beta, 0.0);
      if (objective < best_objective_ - 1e-12 || best_witness_.rounds.empty()) {
        best_objective_ = objective;
        best_witness_ = build_schedule();
      }
      return false;  // keep exploring for a better optimum
    }
    if (round >= horizon_) return false;
    return dfs_round(round + 1, new_acc_alpha, new_acc_beta);
  }

  // The future of a feasibility probe depends on the assignment only through
  // three categories per branching node: unassigned, switched in the previous
  // round (its removals still pend), or older. Frontiers reached by different
  // orders collapse onto one signature, which caps the permutation blowup.
  std::string state_key(int round) const {
    std::string key;
    key.push_back(static_cast<char>(round));
    for (const auto& st : states_) {
      for (size_t i = 0; i < st.branching.size(); i += 4) {
        unsigned char packed = 0;
        for (size_t j = i; j < std::min(i + 4, st.branching.size()); ++j) {
          int r = st.round_of[j];
          int cat = r == 0 ? 0 : r == round - 1 ? 1 : 2;
          packed = static_cast<unsigned char>(packed << 2 | cat);
        }
        key.push_back(static_cast<char>(packed));
      }
      key.push_back('|');
    }
    return key;
  }

  bool dfs_round(int round, double acc_alpha, double acc_beta) {
    const bool memo = mode_ == Mode::kMinRounds;
    std::string key;
    if (memo) {
      key = state_key(round);
      if (failed_states_.count(key)) return false;
    }
    std::vector<double> load(net_.edge_count(), 0.0);
    std::vector<int> touched;
    bool ok = choose_pair(0, round, false, load, touched, acc_alpha, acc_beta);
    if (memo && !ok) failed_states_.insert(std::move(key));
    return ok;
  }

  const Instance& instance_;
  const Network& net_;
  SearchBudget budget_;
  std::vector<PairInfo> infos_;
  std::vector<PairState> states_;

  Mode mode_ = Mode::kMinRounds;
  double alpha_ = 2.0, beta_ = 0.0;
  int horizon_ = 0;
  bool found_ = false;
  double best_objective_ = 0.0;
  UpdateSchedule best_witness_;
  std::unordered_set<std::string> failed_states_;
  std::vector<std::unordered_map<uint64_t, PairEval>> eval_cache_;
  PairEval scratch_eval_;
  uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace

RoundsResult optimal_rounds(const Instance& instance, double alpha, double beta,
                            const SearchBudget& budget) {
  RoundsResult result;
  if (alpha < 1.0 || beta < 0.0) throw std::invalid_argument("alpha >= 1 and beta >= 0 required");
  try {
    ExactSearch search(instance, budget);
    for (int R = 0; R <= budget.max_horizon; ++R) {
      UpdateSchedule witness;
      if (search.feasible(R, alpha, beta, &witness)) {
        result.status = SearchStatus::kFeasible;
        result.rounds = R;
        result.witness = witness;
        return result;
      }
    }
    result.status = SearchStatus::kInfeasible;
  } catch (const BudgetExceeded&) {
    result.status = SearchStatus::kBudgetExceeded;
  }
  return result;
}

AlphaResult optimal_alpha(const Instance& instance, int rounds, const SearchBudget& budget) {
  AlphaResult result;
  if (rounds < 0) throw std::invalid_argument("rounds must be non-negative");
  try {
    ExactSearch search(instance, budget);
    UpdateSchedule witness;
    auto best = search.minimize_augmentation(rounds, ExactSearch::Mode::kMinAlpha, &witness);
    if (best) {
      result.status = SearchStatus::kFeasible;
      result.alpha = *best;
      result.witness = witness;
    } else {
      result.status = SearchStatus::kInfeasible;
    }
  } catch (const BudgetExceeded&) {
    result.status = SearchStatus::kBudgetExceeded;
  }
  return result;
}

BetaResult optimal_beta(const Instance& instance, int rounds, const SearchBudget& budget) {
  BetaResult result;
  if (rounds < 0) throw std::invalid_argument("rounds must be non-negative");
  try {
    ExactSearch search(instance, budget);
    UpdateSchedule witness;
    auto best = search.minimize_augmentation(rounds, ExactSearch::Mode::kMinBeta, &witness);
    if (best) {
      result.status = SearchStatus::kFeasible;
      result.beta = *best;
      result.witness = witness;
    } else {
      result.status = SearchStatus::kInfeasible;
    }
  } catch (const BudgetExceeded&) {
    result.status = SearchStatus::kBudgetExceeded;
  }
  return result;
}

std::map<int, double> interleaving_oracle(const Instance& instance,
                                          const UpdateSchedule& schedule, int round) {
  const Network& net = instance.network;
  auto infos = analyze_pairs(instance);

  // All (pair, node) update events of this global round.
  std::vector<std::pair<int, int>> events;
  for (size_t p = 0; p < instance.pairs.size(); ++p) {
    int local = round - schedule.start_offset[p];
    if (local >= 1 && local <= static_cast<int>(schedule.rounds[p].size()))
      for (int v : schedule.rounds[p][local - 1]) events.emplace_back(static_cast<int>(p), v);
  }
  if (events.size() > 8)
    throw BudgetExceeded("more than 8 updating nodes in round " + std::to_string(round));

  // Nodes already updated before this round, per pair.
  std::vector<std::unordered_set<int>> before(instance.pairs.size());
  for (size_t p = 0; p < instance.pairs.size(); ++p)
    for (size_t r = 0; r < schedule.rounds[p].size(); ++r)
      if (schedule.start_offset[p] + static_cast<int>(r) + 1 < round)
        for (int v : schedule.rounds[p][r]) before[p].insert(v);

  // Any subset of the round's events is the prefix of some interleaving, and
  // pairs progress independently, so sweeping all subsets covers every
  // reachable instant.
  std::map<int, double> peak;
  size_t nstates = size_t{1} << events.size();
  for (size_t mask = 0; mask < nstates; ++mask) {
    std::map<int, double> state_load;
    for (size_t p = 0; p < instance.pairs.size(); ++p) {
      std::unordered_set<int> updated = before[p];
      for (size_t i = 0; i < events.size(); ++i)
        if ((mask & (size_t{1} << i)) && events[i].first == static_cast<int>(p))
          updated.insert(events[i].second);
      const PairInfo& info = infos[p];
      const FlowPair& fp = instance.pairs[p];
      std::unordered_set<int> visited;
      int cur = fp.source;
      while (cur != fp.terminal && visited.insert(cur).second) {
        const auto& rules = updated.count(cur) ? info.out_new : info.out_old;
        auto it = rules.find(cur);
        if (it == rules.end()) break;
        state_load[it->second] += fp.demand;
        cur = net.edge(it->second).second;
      }
    }
    for (const auto& [e, l] : state_load) {
      auto it = peak.find(e);
      if (it == peak.end() || it->second < l) peak[e] = l;
    }
  }
  return peak;
}

}  // namespace netupd

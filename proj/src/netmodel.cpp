#include "netupd/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace netupd {

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

bool parse_double(const std::string& tok, double& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_long(const std::string& tok, long& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string edge_name(const Network& net, int tail, int head) {
  return "(" + net.node_name(tail) + "," + net.node_name(head) + ")";
}

}  // namespace

Network::Network(std::vector<std::string> node_names,
                 const std::vector<std::tuple<std::string, std::string, double>>& edge_list) {
  std::sort(node_names.begin(), node_names.end());
  node_names.erase(std::unique(node_names.begin(), node_names.end()), node_names.end());
  names_ = std::move(node_names);
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) name_to_index_[names_[i]] = i;

  std::vector<std::tuple<int, int, double>> resolved;
  resolved.reserve(edge_list.size());
  for (const auto& [tail, head, cap] : edge_list) {
    int u = node_index(tail);
    int v = node_index(head);
    if (u < 0) throw SemanticError("edge references undeclared node '" + tail + "'");
    if (v < 0) throw SemanticError("edge references undeclared node '" + head + "'");
    resolved.emplace_back(u, v, cap);
  }
  std::sort(resolved.begin(), resolved.end(),
            [](const auto& a, const auto& b) {
              return std::pair(std::get<0>(a), std::get<1>(a)) <
                     std::pair(std::get<0>(b), std::get<1>(b));
            });
  for (const auto& [u, v, cap] : resolved) {
    if (edge_to_index_.count({u, v}))
      throw SemanticError("duplicate edge (" + names_[u] + "," + names_[v] + ")");
    edge_to_index_[{u, v}] = static_cast<int>(edges_.size());
    edges_.emplace_back(u, v);
    capacity_.push_back(cap);
  }
}

int Network::node_index(const std::string& name) const {
  auto it = name_to_index_.find(name);
  return it == name_to_index_.end() ? -1 : it->second;
}

int Network::edge_index(int tail, int head) const {
  auto it = edge_to_index_.find({tail, head});
  return it == edge_to_index_.end() ? -1 : it->second;
}

double Network::cmax() const {
  double m = 0.0;
  for (double c : capacity_) m = std::max(m, c);
  return m;
}

namespace {

// Appends violations of one path (simplicity, endpoints, edge existence).
void check_path(const Network& net, const FlowPair& pair, const std::vector<int>& path,
                const char* label, std::vector<std::string>& out) {
  std::string prefix = "pair " + std::to_string(pair.id) + " " + label + " path: ";
  if (path.size() < 2) {
    out.push_back(prefix + "fewer than two nodes");
    return;
  }
  if (path.front() != pair.source) out.push_back(prefix + "does not start at source");
  if (path.back() != pair.terminal) out.push_back(prefix + "does not end at terminal");
  std::unordered_set<int> seen;
  for (int v : path) {
    if (v < 0 || v >= net.node_count()) {
      out.push_back(prefix + "unknown node index");
      return;
    }
    if (!seen.insert(v).second) {
      out.push_back(prefix + "path not simple (revisits " + net.node_name(v) + ")");
      return;
    }
  }
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    if (net.edge_index(path[i], path[i + 1]) < 0) {
      out.push_back(prefix + "uses missing edge " + edge_name(net, path[i], path[i + 1]));
    }
  }
}

}  // namespace

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> out;
  const Network& net = instance.network;

  for (int e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.edge(e);
    if (u == v) out.push_back("self-loop edge at node " + net.node_name(u));
    if (!(net.capacity(e) > 0.0))
      out.push_back("edge " + edge_name(net, u, v) + " has non-positive capacity");
  }

  std::set<long> ids;
  for (const FlowPair& pair : instance.pairs) {
    if (!ids.insert(pair.id).second)
      out.push_back("duplicate pair id " + std::to_string(pair.id));
    if (pair.source == pair.terminal)
      out.push_back("pair " + std::to_string(pair.id) + ": source equals terminal");
    if (!(pair.demand > 0.0))
      out.push_back("pair " + std::to_string(pair.id) + ": non-positive demand");
    check_path(net, pair, pair.old_path, "old", out);
    check_path(net, pair, pair.new_path, "new", out);
  }
  if (!out.empty()) return out;  // load checks need resolvable paths

  // Each of the all-old and all-new assignments must fit the capacities.
  std::vector<double> old_load(net.edge_count(), 0.0), new_load(net.edge_count(), 0.0);
  for (const FlowPair& pair : instance.pairs) {
    for (size_t i = 0; i + 1 < pair.old_path.size(); ++i)
      old_load[net.edge_index(pair.old_path[i], pair.old_path[i + 1])] += pair.demand;
    for (size_t i = 0; i + 1 < pair.new_path.size(); ++i)
      new_load[net.edge_index(pair.new_path[i], pair.new_path[i + 1])] += pair.demand;
  }
  for (int e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.edge(e);
    if (old_load[e] > net.capacity(e) + kLoadTolerance)
      out.push_back("old flows exceed capacity on " + edge_name(net, u, v));
    if (new_load[e] > net.capacity(e) + kLoadTolerance)
      out.push_back("new flows exceed capacity on " + edge_name(net, u, v));
  }
  return out;
}

Instance read_instance(const std::string& document) {
  enum Section { kNone, kNodes, kEdges, kPairs };
  Section section = kNone;

  std::vector<std::string> node_names;
  std::vector<std::tuple<std::string, std::string, double>> edge_list;
  struct RawPair {
    long id;
    std::string source, terminal;
    double demand;
    std::vector<std::string> old_path, new_path;
  };
  std::vector<RawPair> raw_pairs;

  std::istringstream in(document);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && (tokens[0] == "nodes" || tokens[0] == "edges" || tokens[0] == "pairs")) {
      section = tokens[0] == "nodes" ? kNodes : tokens[0] == "edges" ? kEdges : kPairs;
      continue;
    }
    switch (section) {
      case kNone:
        throw ParseError("content before a section header", lineno);
      case kNodes:
        if (tokens.size() != 1) throw ParseError("expected one node id per line", lineno);
        node_names.push_back(tokens[0]);
        break;
      case kEdges: {
        if (tokens.size() == 2) throw ParseError("edge without capacity", lineno);
        if (tokens.size() != 3) throw ParseError("expected 'tail head capacity'", lineno);
        double cap;
        if (!parse_double(tokens[2], cap)) throw ParseError("bad capacity value", lineno);
        edge_list.emplace_back(tokens[0], tokens[1], cap);
        break;
      }
      case kPairs: {
        // id source terminal demand | old nodes | new nodes
        std::vector<std::vector<std::string>> parts(1);
        for (auto& t : tokens) {
          if (t == "|")
            parts.emplace_back();
          else
            parts.back().push_back(t);
        }
        if (parts.size() != 3)
          throw ParseError("expected 'id source terminal demand | old-path | new-path'", lineno);
        if (parts[0].size() != 4) throw ParseError("expected 'id source terminal demand'", lineno);
        RawPair rp;
        if (!parse_long(parts[0][0], rp.id)) throw ParseError("bad pair id", lineno);
        rp.source = parts[0][1];
        rp.terminal = parts[0][2];
        if (!parse_double(parts[0][3], rp.demand)) throw ParseError("bad demand value", lineno);
        rp.old_path = parts[1];
        rp.new_path = parts[2];
        if (rp.old_path.empty() || rp.new_path.empty())
          throw ParseError("empty path in pair", lineno);
        raw_pairs.push_back(std::move(rp));
        break;
      }
    }
  }

  Instance instance;
  instance.network = Network(node_names, edge_list);
  for (const RawPair& rp : raw_pairs) {
    FlowPair pair;
    pair.id = rp.id;
    pair.source = instance.network.node_index(rp.source);
    pair.terminal = instance.network.node_index(rp.terminal);
    if (pair.source < 0) throw SemanticError("pair " + std::to_string(rp.id) + ": unknown source '" + rp.source + "'");
    if (pair.terminal < 0) throw SemanticError("pair " + std::to_string(rp.id) + ": unknown terminal '" + rp.terminal + "'");
    pair.demand = rp.demand;
    auto resolve = [&](const std::vector<std::string>& names, std::vector<int>& out_path) {
      for (const std::string& n : names) {
        int v = instance.network.node_index(n);
        if (v < 0) throw SemanticError("pair " + std::to_string(rp.id) + ": unknown path node '" + n + "'");
        out_path.push_back(v);
      }
    };
    resolve(rp.old_path, pair.old_path);
    resolve(rp.new_path, pair.new_path);
    instance.pairs.push_back(std::move(pair));
  }
  std::sort(instance.pairs.begin(), instance.pairs.end(),
            [](const FlowPair& a, const FlowPair& b) { return a.id < b.id; });

  auto violations = validate_instance(instance);
  if (!violations.empty()) throw SemanticError(violations.front());
  return instance;
}

std::string write_instance(const Instance& instance) {
  const Network& net = instance.network;
  std::ostringstream out;
  out << "nodes\n";
  for (const std::string& n : net.node_names()) out << n << "\n";
  out << "edges\n";
  for (int e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.edge(e);
    out << net.node_name(u) << " " << net.node_name(v) << " " << format_number(net.capacity(e))
        << "\n";
  }
  out << "pairs\n";
  std::vector<const FlowPair*> ordered;
  for (const FlowPair& p : instance.pairs) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const FlowPair* a, const FlowPair* b) { return a->id < b->id; });
  for (const FlowPair* p : ordered) {
    out << p->id << " " << net.node_name(p->source) << " " << net.node_name(p->terminal) << " "
        << format_number(p->demand);
    out << " |";
    for (int v : p->old_path) out << " " << net.node_name(v);
    out << " |";
    for (int v : p->new_path) out << " " << net.node_name(v);
    out << "\n";
  }
  return out.str();
}

UpdateSchedule UpdateSchedule::empty_for(const Instance& instance) {
  UpdateSchedule s;
  s.rounds.resize(instance.pairs.size());
  s.start_offset.assign(instance.pairs.size(), 0);
  return s;
}

int UpdateSchedule::horizon() const {
  int h = 0;
  for (size_t p = 0; p < rounds.size(); ++p)
    h = std::max(h, start_offset[p] + static_cast<int>(rounds[p].size()));
  return h;
}

void UpdateSchedule::normalize() {
  for (auto& pair_rounds : rounds) {
    for (auto& set : pair_rounds) std::sort(set.begin(), set.end());
    while (!pair_rounds.empty() && pair_rounds.back().empty()) pair_rounds.pop_back();
  }
}

int UpdateSchedule::local_round_of(int p, int node) const {
  const auto& pr = rounds[p];
  for (size_t r = 0; r < pr.size(); ++r)
    for (int v : pr[r])
      if (v == node) return static_cast<int>(r) + 1;
  return 0;
}

std::string write_schedule(const Instance& instance, const UpdateSchedule& schedule) {
  const Network& net = instance.network;
  std::ostringstream out;
  out << "schedule\n";
  out << "horizon " << schedule.horizon() << "\n";
  for (size_t p = 0; p < schedule.rounds.size(); ++p) {
    out << "pair " << instance.pairs[p].id << " offset " << schedule.start_offset[p] << "\n";
    for (size_t r = 0; r < schedule.rounds[p].size(); ++r) {
      out << "round " << (r + 1);
      std::vector<std::string> names;
      for (int v : schedule.rounds[p][r]) names.push_back(net.node_name(v));
      std::sort(names.begin(), names.end());
      for (const auto& n : names) out << " " << n;
      out << "\n";
    }
  }
  return out.str();
}

UpdateSchedule read_schedule(const Instance& instance, const std::string& document) {
  UpdateSchedule schedule = UpdateSchedule::empty_for(instance);
  std::map<long, int> id_to_index;
  for (size_t p = 0; p < instance.pairs.size(); ++p) id_to_index[instance.pairs[p].id] = static_cast<int>(p);

  std::istringstream in(document);
  std::string line;
  int lineno = 0;
  int current = -1;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (!saw_header) {
      if (tokens.size() != 1 || tokens[0] != "schedule")
        throw ParseError("expected 'schedule' header", lineno);
      saw_header = true;
      continue;
    }
    if (tokens[0] == "horizon") continue;  // informational
    if (tokens[0] == "pair") {
      if (tokens.size() != 4 || tokens[2] != "offset")
        throw ParseError("expected 'pair <id> offset <n>'", lineno);
      long id, off;
      if (!parse_long(tokens[1], id) || !parse_long(tokens[3], off) || off < 0)
        throw ParseError("bad pair/offset value", lineno);
      auto it = id_to_index.find(id);
      if (it == id_to_index.end()) throw SemanticError("schedule references unknown pair id " + tokens[1]);
      current = it->second;
      schedule.start_offset[current] = static_cast<int>(off);
      continue;
    }
    if (tokens[0] == "round") {
      if (current < 0) throw ParseError("'round' before any 'pair'", lineno);
      if (tokens.size() < 2) throw ParseError("expected 'round <n> [nodes...]'", lineno);
      long r;
      if (!parse_long(tokens[1], r) || r < 1) throw ParseError("bad round index", lineno);
      auto& pr = schedule.rounds[current];
      if (static_cast<long>(pr.size()) < r) pr.resize(r);
      for (size_t i = 2; i < tokens.size(); ++i) {
        int v = instance.network.node_index(tokens[i]);
        if (v < 0) throw SemanticError("schedule references unknown node '" + tokens[i] + "'");
        pr[r - 1].push_back(v);
      }
      continue;
    }
    throw ParseError("unrecognized schedule line", lineno);
  }
  if (!saw_header) throw ParseError("missing 'schedule' header", 1);
  schedule.normalize();
  return schedule;
}

}  // namespace netupd

#include "chorex/extraction.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <future>
#include <sstream>

#include "chorex/printer.hpp"

namespace chorex {

std::optional<StrategyKind> strategy_from_code(const std::string& code) {
  if (code == "R") return StrategyKind::Random;
  if (code == "L") return StrategyKind::LongestFirst;
  if (code == "S") return StrategyKind::ShortestFirst;
  if (code == "I") return StrategyKind::InteractionsFirst;
  if (code == "C") return StrategyKind::ConditionalsFirst;
  if (code == "U") return StrategyKind::UnmarkedFirst;
  if (code == "UI") return StrategyKind::UnmarkedThenInteractions;
  if (code == "US") return StrategyKind::UnmarkedThenSelections;
  if (code == "UC") return StrategyKind::UnmarkedThenConditionals;
  if (code == "UR") return StrategyKind::UnmarkedThenRandom;
  return std::nullopt;
}

std::string strategy_code(StrategyKind k) {
  switch (k) {
    case StrategyKind::Random: return "R";
    case StrategyKind::LongestFirst: return "L";
    case StrategyKind::ShortestFirst: return "S";
    case StrategyKind::InteractionsFirst: return "I";
    case StrategyKind::ConditionalsFirst: return "C";
    case StrategyKind::UnmarkedFirst: return "U";
    case StrategyKind::UnmarkedThenInteractions: return "UI";
    case StrategyKind::UnmarkedThenSelections: return "US";
    case StrategyKind::UnmarkedThenConditionals: return "UC";
    case StrategyKind::UnmarkedThenRandom: return "UR";
  }
  return "?";
}

std::vector<StrategyKind> all_strategies() {
  return {StrategyKind::Random,
          StrategyKind::LongestFirst,
          StrategyKind::ShortestFirst,
          StrategyKind::InteractionsFirst,
          StrategyKind::ConditionalsFirst,
          StrategyKind::UnmarkedFirst,
          StrategyKind::UnmarkedThenInteractions,
          StrategyKind::UnmarkedThenSelections,
          StrategyKind::UnmarkedThenConditionals,
          StrategyKind::UnmarkedThenRandom};
}

std::string to_string(FailureKind k) {
  switch (k) {
    case FailureKind::Deadlock: return "Deadlock";
    case FailureKind::BadLoopExhaustion: return "BadLoopExhaustion";
    case FailureKind::NotWellFormed: return "NotWellFormed";
    case FailureKind::Timeout: return "Timeout";
  }
  return "?";
}

std::size_t state_hash(const Network& n, const Marking& m) {
  // Definitions never change along a reduction, so mains + marking identify
  // a state within one extraction; equality is still verified structurally.
  std::hash<std::string> hs;
  std::size_t h = 0x5eed;
  for (const auto& [name, term] : n.processes) {
    h = hash_combine(h, hs(name));
    h = hash_combine(h, hash_value(term.main));
    h = hash_combine(h, m.marked.at(name) ? 2 : 1);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Graph checks and export

bool seg_loops_valid(const Seg& g) {
  // Valid iff the graph without erased edges is acyclic.
  std::map<int, int> color;  // 0 white, 1 gray, 2 black
  std::function<bool(int)> dfs = [&](int v) -> bool {
    color[v] = 1;
    auto it = g.edges.find(v);
    if (it != g.edges.end()) {
      for (const auto& [lab, w] : it->second) {
        if (lab.erased) continue;
        int c = color.count(w) ? color[w] : 0;
        if (c == 1) return false;
        if (c == 0 && !dfs(w)) return false;
      }
    }
    color[v] = 2;
    return true;
  };
  for (const auto& [id, node] : g.nodes) {
    int c = color.count(id) ? color[id] : 0;
    if (c == 0 && !dfs(id)) return false;
  }
  return true;
}

std::size_t node_index_key(std::size_t state_hash, std::string_view choice_path) {
  return hash_combine(state_hash, std::hash<std::string_view>{}(choice_path));
}

bool seg_indices_consistent(const Seg& g) {
  std::size_t indexed = 0;
  for (const auto& [key, ids] : g.node_index) {
    for (int id : ids) {
      auto it = g.nodes.find(id);
      if (it == g.nodes.end() ||
          node_index_key(it->second.state_hash, it->second.choice_path) != key)
        return false;
      ++indexed;
    }
  }
  if (indexed != g.nodes.size()) return false;
  indexed = 0;
  for (const auto& [path, ids] : g.path_index) {
    for (int id : ids) {
      auto it = g.nodes.find(id);
      if (it == g.nodes.end() || it->second.choice_path != path) return false;
      ++indexed;
    }
  }
  if (indexed != g.nodes.size()) return false;
  for (const auto& [id, node] : g.nodes) {
    auto hit = g.node_index.find(node_index_key(node.state_hash, node.choice_path));
    if (hit == g.node_index.end() ||
        std::find(hit->second.begin(), hit->second.end(), id) == hit->second.end())
      return false;
    auto pit = g.path_index.find(node.choice_path);
    if (pit == g.path_index.end() || !pit->second.count(id)) return false;
  }
  return true;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\l";
      continue;
    }
    out += c;
  }
  return out;
}

std::string marking_text(const Marking& m) {
  std::string out;
  for (const auto& [name, marked] : m.marked) {
    if (!out.empty()) out += " ";
    out += name + (marked ? "•" : "◦");
  }
  return out;
}

}  // namespace

std::string seg_to_dot(const Seg& g, const std::string& name) {
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n";
  os << "  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& [id, node] : g.nodes) {
    os << "  n" << id << " [label=\"" << dot_escape(print_network(node.network)) << "\\l"
       << dot_escape(marking_text(node.marking)) << "\"];\n";
  }
  for (const auto& [src, outs] : g.edges) {
    for (const auto& [lab, dst] : outs) {
      os << "  n" << src << " -> n" << dst << " [label=\"" << dot_escape(to_string(lab)) << "\"";
      if (lab.erased) os << ", style=bold";
      os << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Unrolling and synthesis

UnrolledSeg unroll_graph(const Seg& g) {
  std::map<int, int> indegree;
  for (const auto& [src, outs] : g.edges)
    for (const auto& [lab, dst] : outs) ++indegree[dst];

  UnrolledSeg u;
  u.root = g.root;
  int counter = 1;
  for (const auto& [id, node] : g.nodes) {
    int d = indegree.count(id) ? indegree.at(id) : 0;
    // The root closes a loop already with a single incoming edge.
    if (d > 1 || (id == g.root && d >= 1))
      u.names.emplace(id, "X" + std::to_string(counter++));
  }
  int next_leaf = g.next_id;
  for (const auto& [src, outs] : g.edges) {
    for (const auto& [lab, dst] : outs) {
      if (u.names.count(dst)) {
        int leaf = next_leaf++;
        InvocationNode inv{u.names.at(dst), dst};
        u.leaves.emplace(leaf, inv);
        u.invocations.push_back(inv);
        u.edges[src].emplace_back(lab, leaf);
      } else {
        u.edges[src].emplace_back(lab, dst);
      }
    }
  }
  return u;
}

Choreography synthesize(const Seg& g, const UnrolledSeg& u) {
  std::function<ChorBodyPtr(int)> read = [&](int v) -> ChorBodyPtr {
    if (auto leaf = u.leaves.find(v); leaf != u.leaves.end()) return call_c(leaf->second.name);
    auto eit = u.edges.find(v);
    if (eit == u.edges.end() || eit->second.empty()) return done_c();
    const auto& outs = eit->second;
    if (outs.size() == 1) {
      const auto& [lab, w] = outs.front();
      switch (lab.kind) {
        case TransitionLabel::Kind::Com:
          return com_c(lab.sender, lab.expr, lab.receiver, read(w));
        case TransitionLabel::Kind::Sel:
          return sel_c(lab.sender, lab.receiver, lab.label, read(w));
        default:
          throw std::logic_error("single edge with a conditional label");
      }
    }
    assert(outs.size() == 2);
    assert(outs[0].first.kind == TransitionLabel::Kind::Then);
    assert(outs[1].first.kind == TransitionLabel::Kind::Else);
    return cond_c(outs[0].first.sender, outs[0].first.expr, read(outs[0].second),
                  read(outs[1].second));
  };

  ChorDefs defs;
  for (const auto& [id, name] : u.names) defs.emplace(name, read(id));
  ChorBodyPtr main =
      u.names.count(g.root) ? call_c(u.names.at(g.root)) : read(g.root);
  return make_choreography(std::move(defs), std::move(main));
}

// ---------------------------------------------------------------------------
// Strategies

namespace {

std::vector<ProcessName> involved_processes(const Action& a) {
  if (a.kind == ActionKind::Conditional) return {a.sender};
  return {a.sender, a.receiver};
}

long involved_size(const Action& a, const Network& n) {
  long total = 0;
  for (const auto& p : involved_processes(a)) total += static_cast<long>(term_size(n.processes.at(p)));
  return total;
}

int unmarked_count(const Action& a, const Marking& m) {
  int c = 0;
  for (const auto& p : involved_processes(a))
    if (!m.marked.at(p)) ++c;
  return c;
}

int interaction_rank(const Action& a) { return a.kind == ActionKind::Conditional ? 1 : 0; }
int conditional_rank(const Action& a) { return a.kind == ActionKind::Conditional ? 0 : 1; }
int selection_rank(const Action& a) {
  switch (a.kind) {
    case ActionKind::Selection: return 0;
    case ActionKind::Communication: return 1;
    case ActionKind::Conditional: return 2;
  }
  return 3;
}

void shuffle_actions(std::vector<Action>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

std::vector<Action> sort_actions(std::vector<Action> actions, const Strategy& s,
                                 const ConcreteNode& node, std::mt19937_64& rng) {
  auto by = [&](auto key) {
    std::stable_sort(actions.begin(), actions.end(),
                     [&](const Action& a, const Action& b) { return key(a) < key(b); });
  };
  const Marking& m = node.marking;
  const Network& net = node.network;
  switch (s.kind) {
    case StrategyKind::Random:
      shuffle_actions(actions, rng);
      break;
    case StrategyKind::LongestFirst:
      by([&](const Action& a) { return -involved_size(a, net); });
      break;
    case StrategyKind::ShortestFirst:
      by([&](const Action& a) { return involved_size(a, net); });
      break;
    case StrategyKind::InteractionsFirst:
      by([&](const Action& a) { return interaction_rank(a); });
      break;
    case StrategyKind::ConditionalsFirst:
      by([&](const Action& a) { return conditional_rank(a); });
      break;
    case StrategyKind::UnmarkedFirst:
      by([&](const Action& a) { return -unmarked_count(a, m); });
      break;
    case StrategyKind::UnmarkedThenInteractions:
      by([&](const Action& a) { return std::pair(-unmarked_count(a, m), interaction_rank(a)); });
      break;
    case StrategyKind::UnmarkedThenSelections:
      by([&](const Action& a) { return std::pair(-unmarked_count(a, m), selection_rank(a)); });
      break;
    case StrategyKind::UnmarkedThenConditionals:
      by([&](const Action& a) { return std::pair(-unmarked_count(a, m), conditional_rank(a)); });
      break;
    case StrategyKind::UnmarkedThenRandom:
      shuffle_actions(actions, rng);
      by([&](const Action& a) { return -unmarked_count(a, m); });
      break;
  }
  return actions;
}

// ---------------------------------------------------------------------------
// Graph construction

SegBuilder::SegBuilder(Network initial, Strategy strategy, std::set<ProcessName> services,
                       std::optional<Clock::time_point> deadline)
    : strategy_(strategy),
      services_(std::move(services)),
      deadline_(deadline),
      rng_(strategy.seed) {
  Marking m = initial_marking(initial, services_);
  std::size_t h = state_hash(initial, m);
  seg_.root = create_node(h, Reduced{std::move(initial), std::move(m), false}, -1, "");
}

BuildResult SegBuilder::run() {
  BuildResult r = build_node(seg_.root);
  assert(r != BuildResult::BadLoop);
  assert(r != BuildResult::Ok || seg_loops_valid(seg_));
  assert(seg_indices_consistent(seg_));
  return r;
}

void SegBuilder::check_deadline() const {
  if (deadline_ && Clock::now() > *deadline_) throw TimedOut("extraction deadline exceeded");
}

void SegBuilder::record_failure(FailureKind k) {
  if (!failure_set_) {
    failure_ = k;
    failure_set_ = true;
  }
}

int SegBuilder::create_node(std::size_t state_h, Reduced&& r, int parent, ChoicePath path) {
  check_deadline();
  int id = seg_.next_id++;
  ++nodes_created_;
  ConcreteNode node;
  node.id = id;
  node.state_hash = state_h;
  node.network = std::move(r.network);
  node.marking = std::move(r.marking);
  node.choice_path = std::move(path);
  node.creation_parent = parent;
  node.creation_edge_erased = r.erased;
  if (parent < 0 || r.erased) {
    node.bad_nodes = {id};
  } else {
    node.bad_nodes = seg_.nodes.at(parent).bad_nodes;
    node.bad_nodes.insert(id);
  }
  seg_.node_index[node_index_key(node.state_hash, node.choice_path)].push_back(id);
  seg_.path_index[node.choice_path].insert(id);
  seg_.nodes.emplace(id, std::move(node));
  return id;
}

void SegBuilder::remove_node(int id) {
  auto it = seg_.nodes.find(id);
  assert(it != seg_.nodes.end());
  const ConcreteNode& node = it->second;
  auto hit = seg_.node_index.find(node_index_key(node.state_hash, node.choice_path));
  if (hit != seg_.node_index.end()) {
    auto& ids = hit->second;
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
    if (ids.empty()) seg_.node_index.erase(hit);
  }
  auto pit = seg_.path_index.find(node.choice_path);
  if (pit != seg_.path_index.end()) {
    pit->second.erase(id);
    if (pit->second.empty()) seg_.path_index.erase(pit);
  }
  seg_.edges.erase(id);
  seg_.nodes.erase(it);
}

void SegBuilder::remove_then_subtree(const ChoicePath& prefix) {
  std::vector<int> doomed;
  for (auto it = seg_.path_index.lower_bound(prefix); it != seg_.path_index.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    doomed.insert(doomed.end(), it->second.begin(), it->second.end());
  }
  for (int id : doomed) remove_node(id);
}

std::optional<int> SegBuilder::find_loop_candidate(std::size_t state_h, const Network& net,
                                                   const Marking& m,
                                                   const ChoicePath& current) const {
  // Only prefixes of the current path qualify, so probe one slot per prefix
  // length (longest first) instead of scanning same-state buckets.
  std::optional<int> found;
  for (std::size_t len = current.size() + 1; len-- > 0;) {
    std::string_view prefix(current.data(), len);
    auto it = seg_.node_index.find(node_index_key(state_h, prefix));
    if (it == seg_.node_index.end()) continue;
    for (int id : it->second) {
      const ConcreteNode& cand = seg_.nodes.at(id);
      if (cand.choice_path != prefix) continue;
      if (!(cand.marking == m) || !equal(cand.network, net)) continue;
      // The prefix discipline allows at most one occurrence of a state on
      // the creation path; a second would have closed a loop at creation.
      assert(!found);
      found = id;
#ifdef NDEBUG
      return found;
#endif
    }
  }
  return found;
}

void SegBuilder::debug_check_candidate(int current, int candidate) const {
#ifndef NDEBUG
  // lem:badnodes — the unique creation path between candidate and current
  // contains an erased edge iff candidate is absent from current's bad list.
  bool saw_erased = false;
  int n = current;
  std::size_t steps = 0;
  while (n != candidate) {
    const ConcreteNode& node = seg_.nodes.at(n);
    if (node.creation_edge_erased) saw_erased = true;
    n = node.creation_parent;
    assert(n >= 0 && "loop candidate must lie on the creation path");
    assert(++steps <= seg_.nodes.size());
  }
  bool in_bad = seg_.nodes.at(current).bad_nodes.count(candidate) > 0;
  assert(saw_erased == !in_bad);
#else
  (void)current;
  (void)candidate;
#endif
}

BuildResult SegBuilder::build_node(int id) {
  check_deadline();
  const ConcreteNode& node = seg_.nodes.at(id);
  if (network_terminated(node.network)) return BuildResult::Ok;  // leaf

  std::vector<Action> actions = enabled_actions(node.network);
  if (actions.empty()) {
    record_failure(FailureKind::Deadlock);
    return BuildResult::Fail;
  }
  actions = sort_actions(std::move(actions), strategy_, node, rng_);

  for (const Action& a : actions) {
    BuildResult r = a.kind == ActionKind::Conditional ? attempt_conditional(id, a)
                                                      : attempt_communication(id, a);
    if (r == BuildResult::Ok) return BuildResult::Ok;
    if (r == BuildResult::Fail) return BuildResult::Fail;  // deadlocks are definitive
  }
  // Every scheduling hit an invalid loop. Confluence makes this definitive:
  // any erasing action reachable before would still be reachable from here.
  record_failure(FailureKind::BadLoopExhaustion);
  return BuildResult::Fail;
}

BuildResult SegBuilder::attempt_communication(int id, const Action& a) {
  const ConcreteNode& node = seg_.nodes.at(id);
  Reduced red = reduce(node.network, node.marking, a);
  TransitionLabel lab = transition_label(a, std::nullopt, red.erased);
  std::size_t h = state_hash(red.network, red.marking);

  if (auto cand = find_loop_candidate(h, red.network, red.marking, node.choice_path)) {
    debug_check_candidate(id, *cand);
    bool valid = red.erased || !node.bad_nodes.count(*cand);
    if (valid) {
      seg_.edges[id].emplace_back(std::move(lab), *cand);
      return BuildResult::Ok;
    }
    ++bad_loop_hits_;
    return BuildResult::BadLoop;
  }

  ChoicePath path = node.choice_path;
  int child = create_node(h, std::move(red), id, std::move(path));
  seg_.edges[id].emplace_back(std::move(lab), child);
  BuildResult r = build_node(child);
  if (r != BuildResult::Ok) {
    auto& outs = seg_.edges.at(id);
    assert(!outs.empty() && outs.back().second == child);
    outs.pop_back();
    if (outs.empty()) seg_.edges.erase(id);
    remove_node(child);
    return r;
  }
  return BuildResult::Ok;
}

BuildResult SegBuilder::attempt_conditional(int id, const Action& a) {
  const ConcreteNode& node = seg_.nodes.at(id);
  const ChoicePath base = node.choice_path;
  assert(!seg_.edges.count(id) || seg_.edges.at(id).empty());

  // then branch
  Reduced red_then = reduce(node.network, node.marking, a, CondBranch::Then);
  TransitionLabel lab_then = transition_label(a, CondBranch::Then, red_then.erased);
  std::size_t h_then = state_hash(red_then.network, red_then.marking);
  if (auto cand = find_loop_candidate(h_then, red_then.network, red_then.marking, base)) {
    debug_check_candidate(id, *cand);
    bool valid = red_then.erased || !node.bad_nodes.count(*cand);
    if (!valid) {
      ++bad_loop_hits_;
      return BuildResult::BadLoop;
    }
    seg_.edges[id].emplace_back(std::move(lab_then), *cand);
  } else {
    int child = create_node(h_then, std::move(red_then), id, base + '0');
    seg_.edges[id].emplace_back(std::move(lab_then), child);
    BuildResult r = build_node(child);
    if (r != BuildResult::Ok) {
      auto& outs = seg_.edges.at(id);
      outs.pop_back();
      if (outs.empty()) seg_.edges.erase(id);
      remove_node(child);
      return r;
    }
  }

  // else branch; then succeeded
  Reduced red_else = reduce(node.network, node.marking, a, CondBranch::Else);
  TransitionLabel lab_else = transition_label(a, CondBranch::Else, red_else.erased);
  std::size_t h_else = state_hash(red_else.network, red_else.marking);
  BuildResult else_result = BuildResult::Ok;
  if (auto cand = find_loop_candidate(h_else, red_else.network, red_else.marking, base)) {
    debug_check_candidate(id, *cand);
    bool valid = red_else.erased || !node.bad_nodes.count(*cand);
    if (valid) {
      seg_.edges[id].emplace_back(std::move(lab_else), *cand);
    } else {
      ++bad_loop_hits_;
      else_result = BuildResult::BadLoop;
    }
  } else {
    int child = create_node(h_else, std::move(red_else), id, base + '1');
    seg_.edges[id].emplace_back(std::move(lab_else), child);
    else_result = build_node(child);
    if (else_result != BuildResult::Ok) {
      auto& outs = seg_.edges.at(id);
      outs.pop_back();
      remove_node(child);
    }
  }

  if (else_result != BuildResult::Ok) {
    // The whole then subtree must go, or later loop-validity decisions would
    // see nodes that are no longer justified by two live branches.
    remove_then_subtree(base + '0');
    auto eit = seg_.edges.find(id);
    if (eit != seg_.edges.end()) {
      eit->second.clear();
      seg_.edges.erase(eit);
    }
    return else_result;
  }
  return BuildResult::Ok;
}

// ---------------------------------------------------------------------------
// Top-level extraction

namespace {

ChorBodyPtr rename_calls(const ChorBodyPtr& b,
                         const std::map<ProcedureName, ProcedureName>& map) {
  return std::visit(
      Match{
          [&](const DoneC&) { return b; },
          [&](const CallC& x) {
            auto it = map.find(x.name);
            return it == map.end() ? b : call_c(it->second);
          },
          [&](const ComC& x) {
            return com_c(x.sender, x.expr, x.receiver, rename_calls(x.cont, map));
          },
          [&](const SelC& x) {
            return sel_c(x.sender, x.receiver, x.label, rename_calls(x.cont, map));
          },
          [&](const CondC& x) {
            return cond_c(x.decider, x.expr, rename_calls(x.then_branch, map),
                          rename_calls(x.else_branch, map));
          },
      },
      b->node());
}

Choreography rename_procedures(const Choreography& c, int offset) {
  if (offset == 0) return c;
  std::map<ProcedureName, ProcedureName> map;
  for (std::size_t j = 1; j <= c.defs->size(); ++j)
    map["X" + std::to_string(j)] = "X" + std::to_string(j + offset);
  ChorDefs defs;
  for (const auto& [name, body] : *c.defs) defs.emplace(map.at(name), rename_calls(body, map));
  return Choreography{std::make_shared<const ChorDefs>(std::move(defs)),
                      rename_calls(c.main, map)};
}

struct ComponentResult {
  BuildResult result = BuildResult::Fail;
  std::optional<FailureKind> failure;
  long nodes = 0;
  long badloops = 0;
  Seg graph;
  std::optional<Choreography> chor;
};

ComponentResult extract_component(const Network& component, const Strategy& strategy,
                                  const std::set<ProcessName>& services,
                                  std::optional<SegBuilder::Clock::time_point> deadline) {
  std::set<ProcessName> local_services;
  for (const auto& [name, term] : component.processes)
    if (services.count(name)) local_services.insert(name);

  SegBuilder builder(component, strategy, std::move(local_services), deadline);
  ComponentResult out;
  try {
    out.result = builder.run();
  } catch (const TimedOut&) {
    out.result = BuildResult::Fail;
    out.failure = FailureKind::Timeout;
    out.nodes = builder.nodes_created();
    out.badloops = builder.bad_loop_hits();
    return out;
  }
  out.nodes = builder.nodes_created();
  out.badloops = builder.bad_loop_hits();
  if (out.result == BuildResult::Ok) {
    out.graph = builder.graph();
    UnrolledSeg u = unroll_graph(out.graph);
    out.chor = synthesize(out.graph, u);
  } else {
    out.failure = builder.failure();
  }
  return out;
}

}  // namespace

Extraction extract(const Network& n, const ExtractOptions& options) {
  auto started = std::chrono::steady_clock::now();
  std::optional<SegBuilder::Clock::time_point> deadline;
  if (options.timeout) deadline = started + *options.timeout;

  Extraction out;
  out.violations = well_formed(n);
  if (!out.violations.empty()) {
    out.stats.failure = FailureKind::NotWellFormed;
    out.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return out;
  }
  for (const auto& s : options.services)
    if (!n.processes.count(s))
      throw std::invalid_argument("service '" + s + "' is not a process of the network");

  std::vector<Network> components =
      options.split ? split_components(n) : std::vector<Network>{n};

  std::vector<ComponentResult> results(components.size());
  if (options.parallel_components && components.size() > 1) {
    std::vector<std::future<ComponentResult>> futures;
    futures.reserve(components.size());
    for (const auto& comp : components) {
      futures.push_back(std::async(std::launch::async, [&comp, &options, deadline] {
        return extract_component(comp, options.strategy, options.services, deadline);
      }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < components.size(); ++i)
      results[i] = extract_component(components[i], options.strategy, options.services, deadline);
  }

  std::vector<Choreography> chors;
  int offset = 0;
  for (auto& r : results) {
    out.stats.nodes_created += r.nodes;
    out.stats.bad_loop_hits += r.badloops;
    if (r.result == BuildResult::Ok && !out.stats.failure) {
      chors.push_back(rename_procedures(*r.chor, offset));
      offset += static_cast<int>(r.chor->defs->size());
      out.graphs.push_back(std::move(r.graph));
    } else if (r.result != BuildResult::Ok && !out.stats.failure) {
      out.stats.failure = r.failure ? r.failure : FailureKind::Deadlock;
    }
  }
  if (!out.stats.failure) {
    out.program = make_program(std::move(chors));
    out.stats.extractable = true;
  } else {
    out.graphs.clear();
  }
  out.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return out;
}

std::string stats_csv_header() {
  return "name,strategy,time_msec,nodes,badloops,extractable,failure";
}

std::string stats_csv_row(const std::string& name, const Strategy& s, const Stats& stats) {
  std::ostringstream os;
  os << name << "," << strategy_code(s.kind) << ",";
  os.setf(std::ios::fixed);
  os.precision(3);
  os << stats.elapsed_ms << "," << stats.nodes_created << "," << stats.bad_loop_hits << ","
     << (stats.extractable ? "true" : "false") << ","
     << (stats.failure ? to_string(*stats.failure) : "");
  return os.str();
}

}  // namespace chorex

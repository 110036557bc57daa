#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chorex/semantics.hpp"
#include "chorex/syntax.hpp"

namespace chorex {

// Tri-valued outcome of building one piece of the execution graph: FAIL is
// definitive (a reachable deadlock), BADLOOP asks the caller to try another
// scheduling.
enum class BuildResult { Ok, Fail, BadLoop };

enum class StrategyKind {
  Random,
  LongestFirst,
  ShortestFirst,
  InteractionsFirst,
  ConditionalsFirst,
  UnmarkedFirst,
  UnmarkedThenInteractions,
  UnmarkedThenSelections,
  UnmarkedThenConditionals,
  UnmarkedThenRandom,
};

struct Strategy {
  StrategyKind kind = StrategyKind::InteractionsFirst;
  std::uint64_t seed = 0;
};

// Abbreviations: R L S I C U UI US UC UR.
std::optional<StrategyKind> strategy_from_code(const std::string& code);
std::string strategy_code(StrategyKind k);
std::vector<StrategyKind> all_strategies();

enum class FailureKind { Deadlock, BadLoopExhaustion, NotWellFormed, Timeout };
std::string to_string(FailureKind k);

struct Stats {
  long nodes_created = 0;
  long bad_loop_hits = 0;
  double elapsed_ms = 0.0;
  bool extractable = false;
  std::optional<FailureKind> failure;
};

// The binary sequence of conditional branches a node was created under
// ('0' = then, '1' = else). Back edges may only target nodes whose path is a
// prefix of the current node's.
using ChoicePath = std::string;

struct ConcreteNode {
  int id = 0;
  Network network;
  Marking marking;
  ChoicePath choice_path;
  std::set<int> bad_nodes;  // ancestors an edge from here must not close on
  // bookkeeping for index maintenance and the creation-path invariant
  std::size_t state_hash = 0;
  int creation_parent = -1;
  bool creation_edge_erased = false;
};

struct Seg {
  std::map<int, ConcreteNode> nodes;
  std::map<int, std::vector<std::pair<TransitionLabel, int>>> edges;
  int root = 0;
  // (network, marking, choice path) -> nodes, keyed by combined structural
  // hash and verified structurally (equivalent to indexing by canonical
  // printed text). Loop lookups only ever ask for nodes whose path is a
  // prefix of the current one, so they probe one (state, prefix) slot per
  // prefix length; a bucket full of same-state copies from sibling branches
  // is never scanned.
  std::unordered_map<std::size_t, std::vector<int>> node_index;
  std::map<ChoicePath, std::set<int>> path_index;
  int next_id = 0;
};

std::size_t node_index_key(std::size_t state_hash, std::string_view choice_path);

std::size_t state_hash(const Network& n, const Marking& m);

// Every cycle of a valid graph contains an erased edge: removing erased
// edges must leave the graph acyclic.
bool seg_loops_valid(const Seg& g);

// Indices are exact inverses of node contents.
bool seg_indices_consistent(const Seg& g);

std::string seg_to_dot(const Seg& g, const std::string& name = "seg");

struct InvocationNode {
  ProcedureName name;
  int target = 0;
};

struct UnrolledSeg {
  // Edge targets may be invocation leaves (ids >= the source graph's
  // next_id); every ConcreteNode keeps at most one incoming edge.
  std::map<int, std::vector<std::pair<TransitionLabel, int>>> edges;
  std::map<int, ProcedureName> names;    // annotated nodes, in id order
  std::map<int, InvocationNode> leaves;  // invocation leaves by fresh id
  std::vector<InvocationNode> invocations;
  int root = 0;
};

// Annotates every node with more than one incoming edge (and the root when
// it has any) with a fresh procedure name X1, X2, ... and redirects those
// edges to invocation leaves, removing all loops and sharing.
UnrolledSeg unroll_graph(const Seg& g);

// Reads the unrolled graph as a choreography AST.
Choreography synthesize(const Seg& g, const UnrolledSeg& u);

// Orders the enabled actions by the strategy's key; ties keep the
// deterministic order of enabled_actions. rng drives Random shuffles.
std::vector<Action> sort_actions(std::vector<Action> actions, const Strategy& s,
                                 const ConcreteNode& node, std::mt19937_64& rng);

// Depth-first construction of the symbolic execution graph for one network.
class SegBuilder {
 public:
  using Clock = std::chrono::steady_clock;

  SegBuilder(Network initial, Strategy strategy, std::set<ProcessName> services,
             std::optional<Clock::time_point> deadline = std::nullopt);

  BuildResult run();

  const Seg& graph() const { return seg_; }
  long nodes_created() const { return nodes_created_; }
  long bad_loop_hits() const { return bad_loop_hits_; }
  FailureKind failure() const { return failure_; }

 private:
  BuildResult build_node(int id);
  BuildResult attempt_communication(int id, const Action& a);
  BuildResult attempt_conditional(int id, const Action& a);
  int create_node(std::size_t state_h, Reduced&& r, int parent, ChoicePath path);
  void remove_node(int id);
  void remove_then_subtree(const ChoicePath& prefix);
  std::optional<int> find_loop_candidate(std::size_t state_h, const Network& net,
                                         const Marking& m, const ChoicePath& current) const;
  void record_failure(FailureKind k);
  void check_deadline() const;
  void debug_check_candidate(int current, int candidate) const;

  Seg seg_;
  Strategy strategy_;
  std::set<ProcessName> services_;
  std::optional<Clock::time_point> deadline_;
  std::mt19937_64 rng_;
  long nodes_created_ = 0;
  long bad_loop_hits_ = 0;
  FailureKind failure_ = FailureKind::Deadlock;
  bool failure_set_ = false;
};

struct TimedOut : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExtractOptions {
  Strategy strategy;
  std::set<ProcessName> services;
  bool split = true;
  std::optional<std::chrono::milliseconds> timeout;
  bool parallel_components = true;
};

struct Extraction {
  std::optional<Program> program;
  Stats stats;
  std::vector<Violation> violations;  // non-empty iff failure == NotWellFormed
  std::vector<Seg> graphs;            // one per extracted component
};

// Checks well-formedness, splits into connected components (unless disabled),
// builds one graph per component and synthesizes the parallel composition.
// Procedures are renamed X1, X2, ... across components.
Extraction extract(const Network& n, const ExtractOptions& options = {});

// One CSV row: name,strategy,time_msec,nodes,badloops,extractable,failure
std::string stats_csv_header();
std::string stats_csv_row(const std::string& name, const Strategy& s, const Stats& stats);

}  // namespace chorex

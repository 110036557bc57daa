#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chorex/syntax.hpp"

namespace chorex {

// An action a network can execute: a value communication, a label selection,
// or one process evaluating the guard of a conditional.
enum class ActionKind { Communication, Selection, Conditional };

struct Action {
  ActionKind kind;
  ProcessName sender;    // sender / selector / decider
  ProcessName receiver;  // empty for Conditional
  Expression expr;       // Communication and Conditional
  Label label;           // Selection
};

bool operator==(const Action& a, const Action& b);
std::string to_string(const Action& a);

Action communication(ProcessName sender, Expression expr, ProcessName receiver);
Action selection(ProcessName sender, ProcessName receiver, Label label);
Action conditional(ProcessName decider, Expression expr);

enum class CondBranch { Then, Else };

// Per-process progress flags. Services are marked from the start and are
// never unmarked when the marking is erased.
struct Marking {
  std::map<ProcessName, bool> marked;
  std::set<ProcessName> services;
};

bool operator==(const Marking& a, const Marking& b);
Marking initial_marking(const Network& n, const std::set<ProcessName>& services);

enum class ViolationKind {
  SelfCommunication,
  UnknownPartner,
  UndefinedProcedure,
  UnproductiveCallCycle,
};

struct Violation {
  ProcessName process;
  ViolationKind kind;
  std::string detail;
};

std::string to_string(const Violation& v);

// Empty iff no process names itself or an unknown partner, every call is
// defined locally, and no definition is a bare call reaching itself through
// a chain of bare calls.
std::vector<Violation> well_formed(const Network& n);

struct HeadNormalForm {
  BehaviourPtr head;
  bool unfolded;
};

// Unfolds calls at the head until the head is not a call; at most |defs|
// replacements, then CycleError.
HeadNormalForm head_normalize(const ProcessTerm& t);

// Terminated up to unfolding of bare calls.
bool terminated(const ProcessTerm& t);
bool network_terminated(const Network& n);

// Enabled actions in deterministic process-name order of the initiator.
std::vector<Action> enabled_actions(const Network& n);

struct Reduced {
  Network network;
  Marking marking;
  bool erased;
};

// Executes `a` (branch required iff conditional). Involved processes advance
// past the head action and become marked; when every live process is marked
// the marking is erased: live non-services reset to unmarked.
Reduced reduce(const Network& n, const Marking& m, const Action& a,
               std::optional<CondBranch> branch = std::nullopt);

// Undirected graph: an edge {p,q} iff q appears as a partner anywhere in p.
std::map<ProcessName, std::set<ProcessName>> communication_graph(const Network& n);

// Connected components, ordered by least process name.
std::vector<Network> split_components(const Network& n);

// ---------------------------------------------------------------------------
// Choreography transitions

struct TransitionLabel {
  enum class Kind { Com, Sel, Then, Else };
  Kind kind;
  ProcessName sender;    // sender / decider
  ProcessName receiver;  // Com/Sel only
  Expression expr;       // Com/Then/Else
  Label label;           // Sel only
  bool erased = false;   // whether the step erased the marking (graph edges)
};

// Canonical text: "p.e->q", "p->q[l]", "p.e:then", "p.e:else".
std::string to_string(const TransitionLabel& l);
TransitionLabel transition_label(const Action& a, std::optional<CondBranch> branch, bool erased);

// Out-of-order choreography transitions: after unfolding a bare-call main,
// actions are scanned front to back and enabled while their processes are
// disjoint from everything scanned before them; the first conditional blocks
// all actions behind it.
std::vector<std::pair<TransitionLabel, Choreography>> chor_enabled(const Choreography& c);

}  // namespace chorex

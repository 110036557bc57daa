#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chorex {

// Identifier sorts. All are opaque tokens compared by exact equality.
// Names range over [A-Za-z0-9_*]; expressions may additionally contain
// infix operators and are stored in a canonical spaced form.
using ProcessName = std::string;
using Label = std::string;
using ProcedureName = std::string;
using Expression = std::string;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CycleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class... Ts>
struct Match : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Match(Ts...) -> Match<Ts...>;

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

// ---------------------------------------------------------------------------
// Local behaviours

class Behaviour;
using BehaviourPtr = std::shared_ptr<const Behaviour>;

struct DoneB {};
struct CallB {
  ProcedureName name;
};
struct SendB {
  ProcessName to;
  Expression expr;
  BehaviourPtr cont;
};
struct RecvB {
  ProcessName from;
  BehaviourPtr cont;
};
struct SelectB {
  ProcessName to;
  Label label;
  BehaviourPtr cont;
};
struct OfferB {
  ProcessName from;
  // Branch order is significant and preserved from the source text.
  std::vector<std::pair<Label, BehaviourPtr>> branches;
};
struct CondB {
  Expression expr;
  BehaviourPtr then_branch;
  BehaviourPtr else_branch;
};

class Behaviour {
 public:
  using Node = std::variant<DoneB, CallB, SendB, RecvB, SelectB, OfferB, CondB>;
  explicit Behaviour(Node n) : node_(std::move(n)) {}
  const Node& node() const { return node_; }

 private:
  Node node_;
};

BehaviourPtr done_b();
BehaviourPtr call_b(ProcedureName name);
BehaviourPtr send_b(ProcessName to, Expression expr, BehaviourPtr cont);
BehaviourPtr recv_b(ProcessName from, BehaviourPtr cont);
BehaviourPtr select_b(ProcessName to, Label label, BehaviourPtr cont);
BehaviourPtr offer_b(ProcessName from, std::vector<std::pair<Label, BehaviourPtr>> branches);
BehaviourPtr cond_b(Expression expr, BehaviourPtr then_branch, BehaviourPtr else_branch);

using BehaviourDefs = std::map<ProcedureName, BehaviourPtr>;

struct ProcessTerm {
  std::shared_ptr<const BehaviourDefs> defs;
  BehaviourPtr main;
};

ProcessTerm make_process_term(BehaviourDefs defs, BehaviourPtr main);

struct Network {
  std::map<ProcessName, ProcessTerm> processes;
};

Network make_network(std::map<ProcessName, ProcessTerm> processes);

// ---------------------------------------------------------------------------
// Choreographies

class ChorBody;
using ChorBodyPtr = std::shared_ptr<const ChorBody>;

struct DoneC {};
struct CallC {
  ProcedureName name;
};
struct ComC {
  ProcessName sender;
  Expression expr;
  ProcessName receiver;
  ChorBodyPtr cont;
};
struct SelC {
  ProcessName sender;
  ProcessName receiver;
  Label label;
  ChorBodyPtr cont;
};
struct CondC {
  ProcessName decider;
  Expression expr;
  ChorBodyPtr then_branch;
  ChorBodyPtr else_branch;
};

class ChorBody {
 public:
  using Node = std::variant<DoneC, CallC, ComC, SelC, CondC>;
  explicit ChorBody(Node n) : node_(std::move(n)) {}
  const Node& node() const { return node_; }

 private:
  Node node_;
};

ChorBodyPtr done_c();
ChorBodyPtr call_c(ProcedureName name);
ChorBodyPtr com_c(ProcessName sender, Expression expr, ProcessName receiver, ChorBodyPtr cont);
ChorBodyPtr sel_c(ProcessName sender, ProcessName receiver, Label label, ChorBodyPtr cont);
ChorBodyPtr cond_c(ProcessName decider, Expression expr, ChorBodyPtr then_branch,
                   ChorBodyPtr else_branch);

using ChorDefs = std::map<ProcedureName, ChorBodyPtr>;

struct Choreography {
  std::shared_ptr<const ChorDefs> defs;
  ChorBodyPtr main;
};

// Validates that every call is defined and that no definition is a bare call.
Choreography make_choreography(ChorDefs defs, ChorBodyPtr main);

struct Program {
  std::vector<Choreography> components;
};

// Validates non-emptiness and pairwise-disjoint process sets.
Program make_program(std::vector<Choreography> components);

// ---------------------------------------------------------------------------
// Structural equality and hashing

bool equal(const Behaviour& a, const Behaviour& b);
bool equal(const BehaviourPtr& a, const BehaviourPtr& b);
bool equal(const ProcessTerm& a, const ProcessTerm& b);
bool equal(const Network& a, const Network& b);
bool equal(const ChorBody& a, const ChorBody& b);
bool equal(const ChorBodyPtr& a, const ChorBodyPtr& b);
bool equal(const Choreography& a, const Choreography& b);
bool equal(const Program& a, const Program& b);

inline bool operator==(const Network& a, const Network& b) { return equal(a, b); }
inline bool operator==(const ProcessTerm& a, const ProcessTerm& b) { return equal(a, b); }
inline bool operator==(const Program& a, const Program& b) { return equal(a, b); }
inline bool operator==(const Choreography& a, const Choreography& b) { return equal(a, b); }

std::size_t hash_value(const Behaviour& b);
std::size_t hash_value(const BehaviourPtr& b);

// ---------------------------------------------------------------------------
// Small structural queries

// Node count of a behaviour tree (every constructor counts as one node).
std::size_t ast_size(const Behaviour& b);
// main plus all definition bodies.
std::size_t term_size(const ProcessTerm& t);

// All process names mentioned in a choreography (as sender, receiver or decider).
std::set<ProcessName> chor_processes(const Choreography& c);
std::set<ProcessName> chor_processes(const ChorBody& b);
std::set<ProcessName> program_processes(const Program& p);

bool is_valid_identifier(const std::string& s);
bool is_reserved_word(const std::string& s);

}  // namespace chorex

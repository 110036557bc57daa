#include "chorex/syntax.hpp"

#include <algorithm>

namespace chorex {

namespace {

const char* kReserved[] = {"def", "main", "stop", "if", "then", "else"};

void require_name(const std::string& s, const char* what) {
  if (!is_valid_identifier(s))
    throw ValidationError(std::string(what) + " '" + s + "' is not a valid identifier");
  if (is_reserved_word(s))
    throw ValidationError(std::string(what) + " '" + s + "' is a reserved word");
}

void require_label(const Label& l) {
  // `then` and `else` are accepted: amendment uses them as ordinary labels.
  if (l.empty()) throw ValidationError("label must be non-empty");
}

void require_expr(const Expression& e) {
  if (e.empty()) throw ValidationError("expression must be non-empty");
}

}  // namespace

bool is_valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '*';
  });
}

bool is_reserved_word(const std::string& s) {
  for (const char* r : kReserved)
    if (s == r) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Behaviour factories

BehaviourPtr done_b() {
  static const BehaviourPtr instance = std::make_shared<Behaviour>(DoneB{});
  return instance;
}

BehaviourPtr call_b(ProcedureName name) {
  require_name(name, "procedure name");
  return std::make_shared<Behaviour>(CallB{std::move(name)});
}

BehaviourPtr send_b(ProcessName to, Expression expr, BehaviourPtr cont) {
  require_name(to, "process name");
  require_expr(expr);
  if (!cont) throw ValidationError("send continuation must not be null");
  return std::make_shared<Behaviour>(SendB{std::move(to), std::move(expr), std::move(cont)});
}

BehaviourPtr recv_b(ProcessName from, BehaviourPtr cont) {
  require_name(from, "process name");
  if (!cont) throw ValidationError("receive continuation must not be null");
  return std::make_shared<Behaviour>(RecvB{std::move(from), std::move(cont)});
}

BehaviourPtr select_b(ProcessName to, Label label, BehaviourPtr cont) {
  require_name(to, "process name");
  require_label(label);
  if (!cont) throw ValidationError("selection continuation must not be null");
  return std::make_shared<Behaviour>(SelectB{std::move(to), std::move(label), std::move(cont)});
}

BehaviourPtr offer_b(ProcessName from, std::vector<std::pair<Label, BehaviourPtr>> branches) {
  require_name(from, "process name");
  if (branches.empty()) throw ValidationError("offer must have at least one branch");
  std::set<Label> seen;
  for (const auto& [label, body] : branches) {
    require_label(label);
    if (!body) throw ValidationError("offer branch must not be null");
    if (!seen.insert(label).second)
      throw ValidationError("duplicate offer label '" + label + "'");
  }
  return std::make_shared<Behaviour>(OfferB{std::move(from), std::move(branches)});
}

BehaviourPtr cond_b(Expression expr, BehaviourPtr then_branch, BehaviourPtr else_branch) {
  require_expr(expr);
  if (!then_branch || !else_branch)
    throw ValidationError("conditional branches must not be null");
  return std::make_shared<Behaviour>(
      CondB{std::move(expr), std::move(then_branch), std::move(else_branch)});
}

ProcessTerm make_process_term(BehaviourDefs defs, BehaviourPtr main) {
  if (!main) throw ValidationError("main behaviour must not be null");
  return ProcessTerm{std::make_shared<const BehaviourDefs>(std::move(defs)), std::move(main)};
}

Network make_network(std::map<ProcessName, ProcessTerm> processes) {
  if (processes.empty()) throw ValidationError("network must contain at least one process");
  return Network{std::move(processes)};
}

// ---------------------------------------------------------------------------
// Choreography factories

ChorBodyPtr done_c() {
  static const ChorBodyPtr instance = std::make_shared<ChorBody>(DoneC{});
  return instance;
}

ChorBodyPtr call_c(ProcedureName name) {
  require_name(name, "procedure name");
  return std::make_shared<ChorBody>(CallC{std::move(name)});
}

ChorBodyPtr com_c(ProcessName sender, Expression expr, ProcessName receiver, ChorBodyPtr cont) {
  require_name(sender, "process name");
  require_name(receiver, "process name");
  require_expr(expr);
  if (sender == receiver)
    throw ValidationError("self-communication: " + sender + " -> " + receiver);
  if (!cont) throw ValidationError("communication continuation must not be null");
  return std::make_shared<ChorBody>(
      ComC{std::move(sender), std::move(expr), std::move(receiver), std::move(cont)});
}

ChorBodyPtr sel_c(ProcessName sender, ProcessName receiver, Label label, ChorBodyPtr cont) {
  require_name(sender, "process name");
  require_name(receiver, "process name");
  require_label(label);
  if (sender == receiver)
    throw ValidationError("self-selection: " + sender + " -> " + receiver);
  if (!cont) throw ValidationError("selection continuation must not be null");
  return std::make_shared<ChorBody>(
      SelC{std::move(sender), std::move(receiver), std::move(label), std::move(cont)});
}

ChorBodyPtr cond_c(ProcessName decider, Expression expr, ChorBodyPtr then_branch,
                   ChorBodyPtr else_branch) {
  require_name(decider, "process name");
  require_expr(expr);
  if (!then_branch || !else_branch)
    throw ValidationError("conditional branches must not be null");
  return std::make_shared<ChorBody>(CondC{std::move(decider), std::move(expr),
                                          std::move(then_branch), std::move(else_branch)});
}

namespace {

void collect_calls(const ChorBodyPtr& b, std::set<ProcedureName>& out) {
  std::visit(Match{
                 [&](const DoneC&) {},
                 [&](const CallC& c) { out.insert(c.name); },
                 [&](const ComC& c) { collect_calls(c.cont, out); },
                 [&](const SelC& c) { collect_calls(c.cont, out); },
                 [&](const CondC& c) {
                   collect_calls(c.then_branch, out);
                   collect_calls(c.else_branch, out);
                 },
             },
             b->node());
}

}  // namespace

Choreography make_choreography(ChorDefs defs, ChorBodyPtr main) {
  if (!main) throw ValidationError("main body must not be null");
  std::set<ProcedureName> called;
  collect_calls(main, called);
  for (const auto& [name, body] : defs) {
    if (std::holds_alternative<CallC>(body->node()))
      throw ValidationError("unguarded procedure '" + name + "': definition is a bare call");
    collect_calls(body, called);
  }
  for (const auto& name : called)
    if (!defs.count(name))
      throw ValidationError("call to undefined procedure '" + name + "'");
  return Choreography{std::make_shared<const ChorDefs>(std::move(defs)), std::move(main)};
}

Program make_program(std::vector<Choreography> components) {
  if (components.empty()) throw ValidationError("program must have at least one component");
  std::set<ProcessName> seen;
  for (const auto& c : components) {
    for (const auto& p : chor_processes(c)) {
      if (!seen.insert(p).second)
        throw ValidationError("process '" + p + "' appears in more than one parallel component");
    }
  }
  return Program{std::move(components)};
}

// ---------------------------------------------------------------------------
// Equality

bool equal(const BehaviourPtr& a, const BehaviourPtr& b) {
  if (a == b) return true;
  return equal(*a, *b);
}

bool equal(const Behaviour& a, const Behaviour& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      Match{
          [&](const DoneB&) { return true; },
          [&](const CallB& x) { return x.name == std::get<CallB>(b.node()).name; },
          [&](const SendB& x) {
            const auto& y = std::get<SendB>(b.node());
            return x.to == y.to && x.expr == y.expr && equal(x.cont, y.cont);
          },
          [&](const RecvB& x) {
            const auto& y = std::get<RecvB>(b.node());
            return x.from == y.from && equal(x.cont, y.cont);
          },
          [&](const SelectB& x) {
            const auto& y = std::get<SelectB>(b.node());
            return x.to == y.to && x.label == y.label && equal(x.cont, y.cont);
          },
          [&](const OfferB& x) {
            const auto& y = std::get<OfferB>(b.node());
            if (x.from != y.from || x.branches.size() != y.branches.size()) return false;
            for (std::size_t i = 0; i < x.branches.size(); ++i) {
              if (x.branches[i].first != y.branches[i].first) return false;
              if (!equal(x.branches[i].second, y.branches[i].second)) return false;
            }
            return true;
          },
          [&](const CondB& x) {
            const auto& y = std::get<CondB>(b.node());
            return x.expr == y.expr && equal(x.then_branch, y.then_branch) &&
                   equal(x.else_branch, y.else_branch);
          },
      },
      a.node());
}

bool equal(const ProcessTerm& a, const ProcessTerm& b) {
  if (!equal(a.main, b.main)) return false;
  if (a.defs == b.defs) return true;
  if (a.defs->size() != b.defs->size()) return false;
  auto it = b.defs->begin();
  for (const auto& [name, body] : *a.defs) {
    if (name != it->first || !equal(body, it->second)) return false;
    ++it;
  }
  return true;
}

bool equal(const Network& a, const Network& b) {
  if (a.processes.size() != b.processes.size()) return false;
  auto it = b.processes.begin();
  for (const auto& [name, term] : a.processes) {
    if (name != it->first || !equal(term, it->second)) return false;
    ++it;
  }
  return true;
}

bool equal(const ChorBodyPtr& a, const ChorBodyPtr& b) {
  if (a == b) return true;
  return equal(*a, *b);
}

bool equal(const ChorBody& a, const ChorBody& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      Match{
          [&](const DoneC&) { return true; },
          [&](const CallC& x) { return x.name == std::get<CallC>(b.node()).name; },
          [&](const ComC& x) {
            const auto& y = std::get<ComC>(b.node());
            return x.sender == y.sender && x.expr == y.expr && x.receiver == y.receiver &&
                   equal(x.cont, y.cont);
          },
          [&](const SelC& x) {
            const auto& y = std::get<SelC>(b.node());
            return x.sender == y.sender && x.receiver == y.receiver && x.label == y.label &&
                   equal(x.cont, y.cont);
          },
          [&](const CondC& x) {
            const auto& y = std::get<CondC>(b.node());
            return x.decider == y.decider && x.expr == y.expr &&
                   equal(x.then_branch, y.then_branch) && equal(x.else_branch, y.else_branch);
          },
      },
      a.node());
}

bool equal(const Choreography& a, const Choreography& b) {
  if (!equal(a.main, b.main)) return false;
  if (a.defs == b.defs) return true;
  if (a.defs->size() != b.defs->size()) return false;
  auto it = b.defs->begin();
  for (const auto& [name, body] : *a.defs) {
    if (name != it->first || !equal(body, it->second)) return false;
    ++it;
  }
  return true;
}

bool equal(const Program& a, const Program& b) {
  if (a.components.size() != b.components.size()) return false;
  for (std::size_t i = 0; i < a.components.size(); ++i)
    if (!equal(a.components[i], b.components[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Hashing

std::size_t hash_value(const BehaviourPtr& b) { return hash_value(*b); }

std::size_t hash_value(const Behaviour& b) {
  std::hash<std::string> hs;
  std::size_t h = b.node().index() + 1;
  std::visit(Match{
                 [&](const DoneB&) {},
                 [&](const CallB& x) { h = hash_combine(h, hs(x.name)); },
                 [&](const SendB& x) {
                   h = hash_combine(h, hs(x.to));
                   h = hash_combine(h, hs(x.expr));
                   h = hash_combine(h, hash_value(x.cont));
                 },
                 [&](const RecvB& x) {
                   h = hash_combine(h, hs(x.from));
                   h = hash_combine(h, hash_value(x.cont));
                 },
                 [&](const SelectB& x) {
                   h = hash_combine(h, hs(x.to));
                   h = hash_combine(h, hs(x.label));
                   h = hash_combine(h, hash_value(x.cont));
                 },
                 [&](const OfferB& x) {
                   h = hash_combine(h, hs(x.from));
                   for (const auto& [label, body] : x.branches) {
                     h = hash_combine(h, hs(label));
                     h = hash_combine(h, hash_value(body));
                   }
                 },
                 [&](const CondB& x) {
                   h = hash_combine(h, hs(x.expr));
                   h = hash_combine(h, hash_value(x.then_branch));
                   h = hash_combine(h, hash_value(x.else_branch));
                 },
             },
             b.node());
  return h;
}

// ---------------------------------------------------------------------------
// Structural queries

std::size_t ast_size(const Behaviour& b) {
  return std::visit(Match{
                        [&](const DoneB&) -> std::size_t { return 1; },
                        [&](const CallB&) -> std::size_t { return 1; },
                        [&](const SendB& x) { return 1 + ast_size(*x.cont); },
                        [&](const RecvB& x) { return 1 + ast_size(*x.cont); },
                        [&](const SelectB& x) { return 1 + ast_size(*x.cont); },
                        [&](const OfferB& x) {
                          std::size_t n = 1;
                          for (const auto& [label, body] : x.branches) n += ast_size(*body);
                          return n;
                        },
                        [&](const CondB& x) {
                          return 1 + ast_size(*x.then_branch) + ast_size(*x.else_branch);
                        },
                    },
                    b.node());
}

std::size_t term_size(const ProcessTerm& t) {
  std::size_t n = ast_size(*t.main);
  for (const auto& [name, body] : *t.defs) n += ast_size(*body);
  return n;
}

namespace {

void collect_procs(const ChorBodyPtr& b, std::set<ProcessName>& out) {
  std::visit(Match{
                 [&](const DoneC&) {},
                 [&](const CallC&) {},
                 [&](const ComC& c) {
                   out.insert(c.sender);
                   out.insert(c.receiver);
                   collect_procs(c.cont, out);
                 },
                 [&](const SelC& c) {
                   out.insert(c.sender);
                   out.insert(c.receiver);
                   collect_procs(c.cont, out);
                 },
                 [&](const CondC& c) {
                   out.insert(c.decider);
                   collect_procs(c.then_branch, out);
                   collect_procs(c.else_branch, out);
                 },
             },
             b->node());
}

}  // namespace

std::set<ProcessName> chor_processes(const ChorBody& b) {
  std::set<ProcessName> out;
  auto ptr = std::make_shared<ChorBody>(b);
  collect_procs(ptr, out);
  return out;
}

std::set<ProcessName> chor_processes(const Choreography& c) {
  std::set<ProcessName> out;
  collect_procs(c.main, out);
  for (const auto& [name, body] : *c.defs) collect_procs(body, out);
  return out;
}

std::set<ProcessName> program_processes(const Program& p) {
  std::set<ProcessName> out;
  for (const auto& c : p.components)
    for (const auto& name : chor_processes(c)) out.insert(name);
  return out;
}

}  // namespace chorex

#include "chorex/semantics.hpp"

#include <cassert>
#include <functional>

namespace chorex {

Action communication(ProcessName sender, Expression expr, ProcessName receiver) {
  return Action{ActionKind::Communication, std::move(sender), std::move(receiver),
                std::move(expr), {}};
}

Action selection(ProcessName sender, ProcessName receiver, Label label) {
  return Action{ActionKind::Selection, std::move(sender), std::move(receiver), {},
                std::move(label)};
}

Action conditional(ProcessName decider, Expression expr) {
  return Action{ActionKind::Conditional, std::move(decider), {}, std::move(expr), {}};
}

bool operator==(const Action& a, const Action& b) {
  return a.kind == b.kind && a.sender == b.sender && a.receiver == b.receiver &&
         a.expr == b.expr && a.label == b.label;
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::Communication:
      return a.sender + "." + a.expr + "->" + a.receiver;
    case ActionKind::Selection:
      return a.sender + "->" + a.receiver + "[" + a.label + "]";
    case ActionKind::Conditional:
      return a.sender + "." + a.expr + ":if";
  }
  return {};
}

bool operator==(const Marking& a, const Marking& b) {
  return a.marked == b.marked && a.services == b.services;
}

Marking initial_marking(const Network& n, const std::set<ProcessName>& services) {
  Marking m;
  m.services = services;
  for (const auto& [name, term] : n.processes) m.marked[name] = services.count(name) > 0;
  return m;
}

std::string to_string(const Violation& v) {
  const char* kind = nullptr;
  switch (v.kind) {
    case ViolationKind::SelfCommunication: kind = "self-communication"; break;
    case ViolationKind::UnknownPartner: kind = "unknown partner"; break;
    case ViolationKind::UndefinedProcedure: kind = "undefined procedure"; break;
    case ViolationKind::UnproductiveCallCycle: kind = "unproductive call cycle"; break;
  }
  return v.process + ": " + kind + " (" + v.detail + ")";
}

namespace {

void scan_behaviour(const ProcessName& owner, const BehaviourPtr& b,
                    const std::set<ProcessName>& known, const BehaviourDefs& defs,
                    std::set<std::pair<ViolationKind, std::string>>& out) {
  auto check_partner = [&](const ProcessName& partner) {
    if (partner == owner)
      out.emplace(ViolationKind::SelfCommunication, partner);
    else if (!known.count(partner))
      out.emplace(ViolationKind::UnknownPartner, partner);
  };
  std::visit(Match{
                 [&](const DoneB&) {},
                 [&](const CallB& x) {
                   if (!defs.count(x.name)) out.emplace(ViolationKind::UndefinedProcedure, x.name);
                 },
                 [&](const SendB& x) {
                   check_partner(x.to);
                   scan_behaviour(owner, x.cont, known, defs, out);
                 },
                 [&](const RecvB& x) {
                   check_partner(x.from);
                   scan_behaviour(owner, x.cont, known, defs, out);
                 },
                 [&](const SelectB& x) {
                   check_partner(x.to);
                   scan_behaviour(owner, x.cont, known, defs, out);
                 },
                 [&](const OfferB& x) {
                   check_partner(x.from);
                   for (const auto& [label, body] : x.branches)
                     scan_behaviour(owner, body, known, defs, out);
                 },
                 [&](const CondB& x) {
                   scan_behaviour(owner, x.then_branch, known, defs, out);
                   scan_behaviour(owner, x.else_branch, known, defs, out);
                 },
             },
             b->node());
}

}  // namespace

std::vector<Violation> well_formed(const Network& n) {
  std::vector<Violation> out;
  std::set<ProcessName> known;
  for (const auto& [name, term] : n.processes) known.insert(name);

  for (const auto& [name, term] : n.processes) {
    std::set<std::pair<ViolationKind, std::string>> found;
    scan_behaviour(name, term.main, known, *term.defs, found);
    for (const auto& [def_name, body] : *term.defs)
      scan_behaviour(name, body, known, *term.defs, found);
    for (const auto& [kind, detail] : found) out.push_back({name, kind, detail});

    // Bare-call cycles among definitions: X = Y, Y = X never reach an action.
    std::set<ProcedureName> in_cycle;
    for (const auto& [def_name, body] : *term.defs) {
      std::set<ProcedureName> visited;
      ProcedureName cur = def_name;
      while (true) {
        const auto it = term.defs->find(cur);
        if (it == term.defs->end()) break;
        const auto* call = std::get_if<CallB>(&it->second->node());
        if (!call) break;
        if (!visited.insert(cur).second) {
          in_cycle.insert(visited.begin(), visited.end());
          break;
        }
        cur = call->name;
      }
    }
    if (!in_cycle.empty()) {
      std::string detail;
      for (const auto& x : in_cycle) detail += (detail.empty() ? "" : ", ") + x;
      out.push_back({name, ViolationKind::UnproductiveCallCycle, detail});
    }
  }
  return out;
}

HeadNormalForm head_normalize(const ProcessTerm& t) {
  BehaviourPtr b = t.main;
  std::size_t replacements = 0;
  const std::size_t limit = t.defs->size();
  while (const auto* call = std::get_if<CallB>(&b->node())) {
    if (replacements >= limit)
      throw CycleError("procedure call cycle at head: " + call->name);
    auto it = t.defs->find(call->name);
    if (it == t.defs->end())
      throw ValidationError("call to undefined procedure '" + call->name + "'");
    b = it->second;
    ++replacements;
  }
  return {b, replacements > 0};
}

bool terminated(const ProcessTerm& t) {
  return std::holds_alternative<DoneB>(head_normalize(t).head->node());
}

bool network_terminated(const Network& n) {
  for (const auto& [name, term] : n.processes)
    if (!terminated(term)) return false;
  return true;
}

std::vector<Action> enabled_actions(const Network& n) {
  std::map<ProcessName, BehaviourPtr> heads;
  for (const auto& [name, term] : n.processes) heads[name] = head_normalize(term).head;

  std::vector<Action> out;
  for (const auto& [name, head] : heads) {
    std::visit(Match{
                   [&](const SendB& x) {
                     auto it = heads.find(x.to);
                     if (it == heads.end()) return;
                     const auto* r = std::get_if<RecvB>(&it->second->node());
                     if (r && r->from == name) out.push_back(communication(name, x.expr, x.to));
                   },
                   [&](const SelectB& x) {
                     auto it = heads.find(x.to);
                     if (it == heads.end()) return;
                     const auto* o = std::get_if<OfferB>(&it->second->node());
                     if (!o || o->from != name) return;
                     for (const auto& [label, body] : o->branches)
                       if (label == x.label) {
                         out.push_back(selection(name, x.to, x.label));
                         return;
                       }
                   },
                   [&](const CondB& x) { out.push_back(conditional(name, x.expr)); },
                   [&](const auto&) {},
               },
               head->node());
  }
  return out;
}

namespace {

ProcessTerm advance_to(const ProcessTerm& t, BehaviourPtr next_main) {
  return ProcessTerm{t.defs, std::move(next_main)};
}

}  // namespace

Reduced reduce(const Network& n, const Marking& m, const Action& a,
               std::optional<CondBranch> branch) {
  assert(m.marked.size() == n.processes.size());
  Network net = n;
  std::vector<ProcessName> involved;

  switch (a.kind) {
    case ActionKind::Communication: {
      auto& sender = net.processes.at(a.sender);
      auto& receiver = net.processes.at(a.receiver);
      const auto* send = std::get_if<SendB>(&head_normalize(sender).head->node());
      const auto* recv = std::get_if<RecvB>(&head_normalize(receiver).head->node());
      assert(send && send->to == a.receiver && send->expr == a.expr);
      assert(recv && recv->from == a.sender);
      sender = advance_to(sender, send->cont);
      receiver = advance_to(receiver, recv->cont);
      involved = {a.sender, a.receiver};
      break;
    }
    case ActionKind::Selection: {
      auto& sender = net.processes.at(a.sender);
      auto& receiver = net.processes.at(a.receiver);
      const auto* sel = std::get_if<SelectB>(&head_normalize(sender).head->node());
      const auto* offer = std::get_if<OfferB>(&head_normalize(receiver).head->node());
      assert(sel && sel->to == a.receiver && sel->label == a.label);
      assert(offer && offer->from == a.sender);
      BehaviourPtr taken;
      for (const auto& [label, body] : offer->branches)
        if (label == a.label) taken = body;
      assert(taken);
      sender = advance_to(sender, sel->cont);
      receiver = advance_to(receiver, taken);
      involved = {a.sender, a.receiver};
      break;
    }
    case ActionKind::Conditional: {
      assert(branch.has_value());
      auto& decider = net.processes.at(a.sender);
      const auto* cond = std::get_if<CondB>(&head_normalize(decider).head->node());
      assert(cond && cond->expr == a.expr);
      decider = advance_to(decider,
                           *branch == CondBranch::Then ? cond->then_branch : cond->else_branch);
      involved = {a.sender};
      break;
    }
  }

  Marking marking = m;
  for (const auto& p : involved) marking.marked[p] = true;

  std::vector<ProcessName> live;
  bool all_live_marked = true;
  for (const auto& [name, term] : net.processes) {
    if (terminated(term)) continue;
    live.push_back(name);
    if (!marking.marked.at(name)) all_live_marked = false;
  }

  if (all_live_marked) {
    for (const auto& p : live)
      if (!marking.services.count(p)) marking.marked[p] = false;
  }
  return {std::move(net), std::move(marking), all_live_marked};
}

namespace {

void collect_partners(const BehaviourPtr& b, std::set<ProcessName>& out) {
  std::visit(Match{
                 [&](const DoneB&) {},
                 [&](const CallB&) {},
                 [&](const SendB& x) {
                   out.insert(x.to);
                   collect_partners(x.cont, out);
                 },
                 [&](const RecvB& x) {
                   out.insert(x.from);
                   collect_partners(x.cont, out);
                 },
                 [&](const SelectB& x) {
                   out.insert(x.to);
                   collect_partners(x.cont, out);
                 },
                 [&](const OfferB& x) {
                   out.insert(x.from);
                   for (const auto& [label, body] : x.branches) collect_partners(body, out);
                 },
                 [&](const CondB& x) {
                   collect_partners(x.then_branch, out);
                   collect_partners(x.else_branch, out);
                 },
             },
             b->node());
}

}  // namespace

std::map<ProcessName, std::set<ProcessName>> communication_graph(const Network& n) {
  std::map<ProcessName, std::set<ProcessName>> graph;
  for (const auto& [name, term] : n.processes) graph[name];
  for (const auto& [name, term] : n.processes) {
    std::set<ProcessName> partners;
    collect_partners(term.main, partners);
    for (const auto& [def_name, body] : *term.defs) collect_partners(body, partners);
    for (const auto& q : partners) {
      if (q == name || !graph.count(q)) continue;  // ill-formed edges are ignored here
      graph[name].insert(q);
      graph[q].insert(name);
    }
  }
  return graph;
}

std::vector<Network> split_components(const Network& n) {
  auto graph = communication_graph(n);
  std::set<ProcessName> visited;
  std::vector<Network> out;
  for (const auto& [start, adj] : graph) {
    if (visited.count(start)) continue;
    std::set<ProcessName> comp;
    std::vector<ProcessName> stack{start};
    while (!stack.empty()) {
      ProcessName p = stack.back();
      stack.pop_back();
      if (!comp.insert(p).second) continue;
      for (const auto& q : graph.at(p))
        if (!comp.count(q)) stack.push_back(q);
    }
    visited.insert(comp.begin(), comp.end());
    std::map<ProcessName, ProcessTerm> procs;
    for (const auto& p : comp) procs.emplace(p, n.processes.at(p));
    out.push_back(Network{std::move(procs)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Choreography transitions

std::string to_string(const TransitionLabel& l) {
  switch (l.kind) {
    case TransitionLabel::Kind::Com:
      return l.sender + "." + l.expr + "->" + l.receiver;
    case TransitionLabel::Kind::Sel:
      return l.sender + "->" + l.receiver + "[" + l.label + "]";
    case TransitionLabel::Kind::Then:
      return l.sender + "." + l.expr + ":then";
    case TransitionLabel::Kind::Else:
      return l.sender + "." + l.expr + ":else";
  }
  return {};
}

TransitionLabel transition_label(const Action& a, std::optional<CondBranch> branch, bool erased) {
  TransitionLabel l;
  switch (a.kind) {
    case ActionKind::Communication:
      l.kind = TransitionLabel::Kind::Com;
      break;
    case ActionKind::Selection:
      l.kind = TransitionLabel::Kind::Sel;
      break;
    case ActionKind::Conditional:
      assert(branch.has_value());
      l.kind = *branch == CondBranch::Then ? TransitionLabel::Kind::Then
                                           : TransitionLabel::Kind::Else;
      break;
  }
  l.sender = a.sender;
  l.receiver = a.receiver;
  l.expr = a.expr;
  l.label = a.label;
  l.erased = erased;
  return l;
}

namespace {

// One traversed prefix action of the scan; conditionals never enter the
// prefix (they stop the scan).
using PrefixNode = std::variant<ComC, SelC>;

ChorBodyPtr splice(const std::vector<PrefixNode>& prefix, ChorBodyPtr tail) {
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
    tail = std::visit(Match{
                          [&](const ComC& x) {
                            return com_c(x.sender, x.expr, x.receiver, std::move(tail));
                          },
                          [&](const SelC& x) {
                            return sel_c(x.sender, x.receiver, x.label, std::move(tail));
                          },
                      },
                      *it);
  }
  return tail;
}

}  // namespace

std::vector<std::pair<TransitionLabel, Choreography>> chor_enabled(const Choreography& c) {
  std::vector<std::pair<TransitionLabel, Choreography>> out;
  std::vector<PrefixNode> prefix;
  std::set<ProcessName> blocked;
  std::set<ProcedureName> unfolded;

  ChorBodyPtr cur = c.main;
  bool scanning = true;
  while (scanning) {
    std::visit(
        Match{
            [&](const DoneC&) { scanning = false; },
            [&](const CallC& x) {
              // Calls execute by replacement with their definition; a second
              // unfolding of the same procedure exposes only blocked actions.
              if (!unfolded.insert(x.name).second) {
                scanning = false;
                return;
              }
              auto it = c.defs->find(x.name);
              if (it == c.defs->end())
                throw ValidationError("call to undefined procedure '" + x.name + "'");
              cur = it->second;
            },
            [&](const ComC& x) {
              if (!blocked.count(x.sender) && !blocked.count(x.receiver)) {
                TransitionLabel l{TransitionLabel::Kind::Com, x.sender, x.receiver, x.expr, {},
                                  false};
                out.emplace_back(std::move(l), Choreography{c.defs, splice(prefix, x.cont)});
              }
              blocked.insert(x.sender);
              blocked.insert(x.receiver);
              prefix.emplace_back(x);
              cur = x.cont;
            },
            [&](const SelC& x) {
              if (!blocked.count(x.sender) && !blocked.count(x.receiver)) {
                TransitionLabel l{TransitionLabel::Kind::Sel, x.sender, x.receiver, {}, x.label,
                                  false};
                out.emplace_back(std::move(l), Choreography{c.defs, splice(prefix, x.cont)});
              }
              blocked.insert(x.sender);
              blocked.insert(x.receiver);
              prefix.emplace_back(x);
              cur = x.cont;
            },
            [&](const CondC& x) {
              // The first conditional is a barrier: nothing behind it runs.
              if (!blocked.count(x.decider)) {
                TransitionLabel t{TransitionLabel::Kind::Then, x.decider, {}, x.expr, {}, false};
                TransitionLabel e{TransitionLabel::Kind::Else, x.decider, {}, x.expr, {}, false};
                out.emplace_back(std::move(t),
                                 Choreography{c.defs, splice(prefix, x.then_branch)});
                out.emplace_back(std::move(e),
                                 Choreography{c.defs, splice(prefix, x.else_branch)});
              }
              scanning = false;
            },
        },
        cur->node());
  }
  return out;
}

}  // namespace chorex

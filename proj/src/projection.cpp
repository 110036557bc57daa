#include "chorex/projection.hpp"

#include <functional>

namespace chorex {

std::optional<BehaviourPtr> merge(const BehaviourPtr& a, const BehaviourPtr& b) {
  if (a->node().index() != b->node().index()) return std::nullopt;
  return std::visit(
      Match{
          [&](const DoneB&) -> std::optional<BehaviourPtr> { return done_b(); },
          [&](const CallB& x) -> std::optional<BehaviourPtr> {
            const auto& y = std::get<CallB>(b->node());
            if (x.name != y.name) return std::nullopt;
            return a;
          },
          [&](const SendB& x) -> std::optional<BehaviourPtr> {
            const auto& y = std::get<SendB>(b->node());
            if (x.to != y.to || x.expr != y.expr) return std::nullopt;
            auto cont = merge(x.cont, y.cont);
            if (!cont) return std::nullopt;
            return send_b(x.to, x.expr, *cont);
          },
          [&](const RecvB& x) -> std::optional<BehaviourPtr> {
            const auto& y = std::get<RecvB>(b->node());
            if (x.from != y.from) return std::nullopt;
            auto cont = merge(x.cont, y.cont);
            if (!cont) return std::nullopt;
            return recv_b(x.from, *cont);
          },
          [&](const SelectB& x) -> std::optional<BehaviourPtr> {
            const auto& y = std::get<SelectB>(b->node());
            if (x.to != y.to || x.label != y.label) return std::nullopt;
            auto cont = merge(x.cont, y.cont);
            if (!cont) return std::nullopt;
            return select_b(x.to, x.label, *cont);
          },
          [&](const OfferB& x) -> std::optional<BehaviourPtr> {
            const auto& y = std::get<OfferB>(b->node());
            if (x.from != y.from) return std::nullopt;
            // Union of branch maps; shared labels merge recursively. Branch
            // order: x's branches first, then y's new labels in y's order.
            std::vector<std::pair<Label, BehaviourPtr>> branches;
            for (const auto& [label, body] : x.branches) {
              const BehaviourPtr* other = nullptr;
              for (const auto& [label2, body2] : y.branches)
                if (label2 == label) other = &body2;
              if (other) {
                auto merged = merge(body, *other);
                if (!merged) return std::nullopt;
                branches.emplace_back(label, *merged);
              } else {
                branches.emplace_back(label, body);
              }
            }
            for (const auto& [label, body] : y.branches) {
              bool present = false;
              for (const auto& [label2, body2] : x.branches)
                if (label2 == label) present = true;
              if (!present) branches.emplace_back(label, body);
            }
            return offer_b(x.from, std::move(branches));
          },
          [&](const CondB& x) -> std::optional<BehaviourPtr> {
            const auto& y = std::get<CondB>(b->node());
            if (x.expr != y.expr) return std::nullopt;
            auto t = merge(x.then_branch, y.then_branch);
            auto e = merge(x.else_branch, y.else_branch);
            if (!t || !e) return std::nullopt;
            return cond_b(x.expr, *t, *e);
          },
      },
      a->node());
}

namespace {

// A procedure is live at r when its body mentions r, directly or through
// calls to other live procedures. Calls to non-live procedures project to
// termination, which also removes bare-call chains from the projection.
std::set<ProcedureName> live_procedures(const Choreography& c, const ProcessName& r) {
  std::map<ProcedureName, std::set<ProcedureName>> calls;
  std::set<ProcedureName> live;
  for (const auto& [name, body] : *c.defs) {
    if (chor_processes(*body).count(r)) live.insert(name);
    std::set<ProcedureName> called;
    std::function<void(const ChorBodyPtr&)> walk = [&](const ChorBodyPtr& b) {
      std::visit(Match{
                     [&](const DoneC&) {},
                     [&](const CallC& x) { called.insert(x.name); },
                     [&](const ComC& x) { walk(x.cont); },
                     [&](const SelC& x) { walk(x.cont); },
                     [&](const CondC& x) {
                       walk(x.then_branch);
                       walk(x.else_branch);
                     },
                 },
                 b->node());
    };
    walk(body);
    calls[name] = std::move(called);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, called] : calls) {
      if (live.count(name)) continue;
      for (const auto& x : called)
        if (live.count(x)) {
          live.insert(name);
          changed = true;
          break;
        }
    }
  }
  return live;
}

BehaviourPtr project_body(const ChorBodyPtr& body, const ProcessName& r,
                          const std::set<ProcedureName>& live, const std::string& where) {
  return std::visit(
      Match{
          [&](const DoneC&) { return done_b(); },
          [&](const CallC& x) { return live.count(x.name) ? call_b(x.name) : done_b(); },
          [&](const ComC& x) {
            auto cont = project_body(x.cont, r, live, where);
            if (x.sender == r) return send_b(x.receiver, x.expr, cont);
            if (x.receiver == r) return recv_b(x.sender, cont);
            return cont;
          },
          [&](const SelC& x) {
            auto cont = project_body(x.cont, r, live, where);
            if (x.sender == r) return select_b(x.receiver, x.label, cont);
            if (x.receiver == r)
              return offer_b(x.sender, {{x.label, cont}});
            return cont;
          },
          [&](const CondC& x) {
            auto t = project_body(x.then_branch, r, live, where + "/then");
            auto e = project_body(x.else_branch, r, live, where + "/else");
            if (x.decider == r) return cond_b(x.expr, t, e);
            auto merged = merge(t, e);
            if (!merged)
              throw MergeError(r, where,
                               "branches of conditional " + x.decider + "." + x.expr +
                                   " project to incompatible behaviours");
            return *merged;
          },
      },
      body->node());
}

}  // namespace

Network project(const Choreography& c, std::optional<std::set<ProcessName>> processes) {
  std::set<ProcessName> procs = processes ? *processes : chor_processes(c);
  if (procs.empty())
    throw ValidationError("cannot project a choreography with no processes; pass them explicitly");
  std::map<ProcessName, ProcessTerm> out;
  for (const auto& r : procs) {
    auto live = live_procedures(c, r);
    BehaviourDefs defs;
    for (const auto& [name, body] : *c.defs)
      if (live.count(name)) defs.emplace(name, project_body(body, r, live, "def " + name));
    BehaviourPtr main = project_body(c.main, r, live, "main");
    out.emplace(r, make_process_term(std::move(defs), std::move(main)));
  }
  return make_network(std::move(out));
}

Network project(const Program& p) {
  std::map<ProcessName, ProcessTerm> out;
  for (const auto& c : p.components) {
    Network n = project(c);
    for (auto& [name, term] : n.processes) out.emplace(name, std::move(term));
  }
  return make_network(std::move(out));
}

namespace {

struct AmendState {
  const Choreography* chor;
  std::set<ProcessName> all_procs;
  bool changed = false;
};

ChorBodyPtr amend_body(const ChorBodyPtr& body, AmendState& st) {
  return std::visit(
      Match{
          [&](const DoneC&) { return body; },
          [&](const CallC&) { return body; },
          [&](const ComC& x) {
            return com_c(x.sender, x.expr, x.receiver, amend_body(x.cont, st));
          },
          [&](const SelC& x) {
            return sel_c(x.sender, x.receiver, x.label, amend_body(x.cont, st));
          },
          [&](const CondC& x) {
            ChorBodyPtr t = amend_body(x.then_branch, st);
            ChorBodyPtr e = amend_body(x.else_branch, st);
            // Insert selections for the processes whose branch projections
            // fail to merge. Sorted order keeps the result deterministic.
            std::vector<ProcessName> failing;
            for (const auto& r : st.all_procs) {
              if (r == x.decider) continue;
              auto live = live_procedures(*st.chor, r);
              try {
                BehaviourPtr pt = project_body(t, r, live, "amend");
                BehaviourPtr pe = project_body(e, r, live, "amend");
                if (!merge(pt, pe)) failing.push_back(r);
              } catch (const MergeError&) {
                failing.push_back(r);
              }
            }
            for (auto it = failing.rbegin(); it != failing.rend(); ++it) {
              t = sel_c(x.decider, *it, "then", t);
              e = sel_c(x.decider, *it, "else", e);
              st.changed = true;
            }
            return cond_c(x.decider, x.expr, t, e);
          },
      },
      body->node());
}

}  // namespace

Choreography amend(const Choreography& c) {
  Choreography cur = c;
  for (;;) {
    AmendState st{&cur, chor_processes(cur), false};
    ChorDefs defs;
    for (const auto& [name, body] : *cur.defs) defs.emplace(name, amend_body(body, st));
    ChorBodyPtr main = amend_body(cur.main, st);
    cur = Choreography{std::make_shared<const ChorDefs>(std::move(defs)), std::move(main)};
    if (!st.changed) return cur;
  }
}

Program amend(const Program& p) {
  std::vector<Choreography> comps;
  comps.reserve(p.components.size());
  for (const auto& c : p.components) comps.push_back(amend(c));
  return Program{std::move(comps)};
}

namespace {

std::size_t count_nodes(const ChorBodyPtr& b) {
  return std::visit(Match{
                        [&](const DoneC&) -> std::size_t { return 1; },
                        [&](const CallC&) -> std::size_t { return 1; },
                        [&](const ComC& x) { return 1 + count_nodes(x.cont); },
                        [&](const SelC& x) { return 1 + count_nodes(x.cont); },
                        [&](const CondC& x) {
                          return 1 + count_nodes(x.then_branch) + count_nodes(x.else_branch);
                        },
                    },
                    b->node());
}

std::size_t count_nodes(const Choreography& c) {
  std::size_t n = count_nodes(c.main);
  for (const auto& [name, body] : *c.defs) n += count_nodes(body);
  return n;
}

}  // namespace

std::size_t amendment_insertions(const Choreography& before, const Choreography& after) {
  return count_nodes(after) - count_nodes(before);
}

}  // namespace chorex

#include "chorex/testgen.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <random>

namespace chorex {

namespace {

// All randomness goes through next(n) so outputs depend only on the seed,
// not on library distribution internals.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  std::uint64_t next(std::uint64_t n) { return n == 0 ? 0 : engine() % n; }
};

// ---------------------------------------------------------------------------
// Generator

struct GenCtx {
  Rng rng;
  int nprocs;
  int nprocedures;
  int next_expr = 1;
  int next_label = 1;

  ProcessName proc(std::uint64_t i) { return "p" + std::to_string(i + 1); }
  Expression fresh_expr() { return "e" + std::to_string(next_expr++); }
  Label fresh_label() { return "L" + std::to_string(next_label++); }
};

ChorBodyPtr gen_terminator(GenCtx& ctx) {
  // Uniform over termination and the procedures.
  std::uint64_t choice = ctx.rng.next(ctx.nprocedures + 1);
  if (choice == 0) return done_c();
  return call_c("X" + std::to_string(choice));
}

ChorBodyPtr gen_body(GenCtx& ctx, int actions, int conds) {
  if (actions == 0 && conds == 0) return gen_terminator(ctx);
  bool make_cond = conds > 0 && ctx.rng.next(actions + conds) < static_cast<std::uint64_t>(conds);
  if (make_cond) {
    ProcessName decider = ctx.proc(ctx.rng.next(ctx.nprocs));
    Expression e = ctx.fresh_expr();
    int a1 = static_cast<int>(ctx.rng.next(actions + 1));
    int c1 = static_cast<int>(ctx.rng.next(conds));  // conds-1 split between branches
    ChorBodyPtr t = gen_body(ctx, a1, c1);
    ChorBodyPtr f = gen_body(ctx, actions - a1, conds - 1 - c1);
    return cond_c(decider, e, t, f);
  }
  std::uint64_t pi = ctx.rng.next(ctx.nprocs);
  std::uint64_t qi = ctx.rng.next(ctx.nprocs - 1);
  if (qi >= pi) ++qi;
  ProcessName p = ctx.proc(pi), q = ctx.proc(qi);
  if (ctx.rng.next(2) == 0)
    return com_c(p, ctx.fresh_expr(), q, gen_body(ctx, actions - 1, conds));
  return sel_c(p, q, ctx.fresh_label(), gen_body(ctx, actions - 1, conds));
}

void collect_call_names(const ChorBodyPtr& b, std::set<ProcedureName>& out) {
  std::visit(Match{
                 [&](const DoneC&) {},
                 [&](const CallC& x) { out.insert(x.name); },
                 [&](const ComC& x) { collect_call_names(x.cont, out); },
                 [&](const SelC& x) { collect_call_names(x.cont, out); },
                 [&](const CondC& x) {
                   collect_call_names(x.then_branch, out);
                   collect_call_names(x.else_branch, out);
                 },
             },
             b->node());
}

bool all_procedures_reachable(const Choreography& c) {
  std::set<ProcedureName> reached;
  collect_call_names(c.main, reached);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& name : std::set<ProcedureName>(reached)) {
      auto it = c.defs->find(name);
      if (it == c.defs->end()) continue;
      std::set<ProcedureName> called;
      collect_call_names(it->second, called);
      for (const auto& x : called)
        if (reached.insert(x).second) grew = true;
    }
  }
  return reached.size() == c.defs->size();
}

}  // namespace

Choreography generate(const GenParams& p) {
  if (p.processes < 0 || p.actions < 0 || p.conditionals < 0 || p.procedures < 0)
    throw ValidationError("generation parameters must be non-negative");
  if (p.actions > 0 && p.processes < 2)
    throw ValidationError("at least two processes are needed to generate actions");
  if (p.conditionals > 0 && p.processes < 1)
    throw ValidationError("at least one process is needed to generate conditionals");

  const int bodies = p.procedures + 1;  // main plus each procedure
  std::vector<int> body_actions(bodies), body_conds(bodies);
  for (int i = 0; i < bodies; ++i) {
    body_actions[i] = p.actions / bodies + (i < p.actions % bodies ? 1 : 0);
    body_conds[i] = p.conditionals / bodies + (i < p.conditionals % bodies ? 1 : 0);
  }

  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    GenCtx ctx{Rng(p.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(attempt)),
               p.processes, p.procedures};
    ChorDefs defs;
    for (int i = 1; i <= p.procedures; ++i) {
      ProcedureName name = "X" + std::to_string(i);
      // A zero-budget definition must be Done: a bare call would be unguarded.
      ChorBodyPtr body = (body_actions[i] == 0 && body_conds[i] == 0)
                             ? done_c()
                             : gen_body(ctx, body_actions[i], body_conds[i]);
      defs.emplace(std::move(name), std::move(body));
    }
    ChorBodyPtr main = gen_body(ctx, body_actions[0], body_conds[0]);
    Choreography c = make_choreography(std::move(defs), std::move(main));
    if (all_procedures_reachable(c)) return c;
  }
  throw GenerationExhausted("no choreography with all procedures reachable after " +
                            std::to_string(kMaxAttempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Behaviour surgery shared by the fuzzer and the unroller

namespace {

bool is_action(const Behaviour& b) {
  return !std::holds_alternative<DoneB>(b.node()) && !std::holds_alternative<CallB>(b.node());
}

// The continuation slot an action hands control to first: cont for prefixes,
// the then branch for conditionals, the first branch for offers.
BehaviourPtr first_cont(const Behaviour& b) {
  return std::visit(Match{
                        [&](const SendB& x) { return x.cont; },
                        [&](const RecvB& x) { return x.cont; },
                        [&](const SelectB& x) { return x.cont; },
                        [&](const OfferB& x) { return x.branches.front().second; },
                        [&](const CondB& x) { return x.then_branch; },
                        [&](const auto&) -> BehaviourPtr {
                          throw std::logic_error("first_cont on a non-action");
                        },
                    },
                    b.node());
}

BehaviourPtr with_first_cont(const Behaviour& b, BehaviourPtr c) {
  return std::visit(Match{
                        [&](const SendB& x) { return send_b(x.to, x.expr, std::move(c)); },
                        [&](const RecvB& x) { return recv_b(x.from, std::move(c)); },
                        [&](const SelectB& x) { return select_b(x.to, x.label, std::move(c)); },
                        [&](const OfferB& x) {
                          auto branches = x.branches;
                          branches.front().second = std::move(c);
                          return offer_b(x.from, std::move(branches));
                        },
                        [&](const CondB& x) {
                          return cond_b(x.expr, std::move(c), x.else_branch);
                        },
                        [&](const auto&) -> BehaviourPtr {
                          throw std::logic_error("with_first_cont on a non-action");
                        },
                    },
                    b.node());
}

BehaviourPtr delete_action(const Behaviour& b) { return first_cont(b); }

BehaviourPtr swap_action(const Behaviour& a) {
  BehaviourPtr next = first_cont(a);
  if (!is_action(*next)) return delete_action(a);  // swapping the last action deletes it
  BehaviourPtr inner = with_first_cont(a, first_cont(*next));
  return with_first_cont(*next, std::move(inner));
}

int count_actions(const BehaviourPtr& b) {
  return std::visit(Match{
                        [&](const DoneB&) { return 0; },
                        [&](const CallB&) { return 0; },
                        [&](const SendB& x) { return 1 + count_actions(x.cont); },
                        [&](const RecvB& x) { return 1 + count_actions(x.cont); },
                        [&](const SelectB& x) { return 1 + count_actions(x.cont); },
                        [&](const OfferB& x) {
                          int n = 1;
                          for (const auto& [label, body] : x.branches) n += count_actions(body);
                          return n;
                        },
                        [&](const CondB& x) {
                          return 1 + count_actions(x.then_branch) + count_actions(x.else_branch);
                        },
                    },
                    b->node());
}

using ActionFn = std::function<BehaviourPtr(const Behaviour&)>;

// Rewrites the k-th action node in prefix order; k goes negative once applied.
BehaviourPtr rewrite_kth(const BehaviourPtr& b, int& k, const ActionFn& fn) {
  if (k < 0) return b;
  if (is_action(*b)) {
    if (k == 0) {
      k = -1;
      return fn(*b);
    }
    --k;
  }
  return std::visit(
      Match{
          [&](const DoneB&) { return b; },
          [&](const CallB&) { return b; },
          [&](const SendB& x) { return send_b(x.to, x.expr, rewrite_kth(x.cont, k, fn)); },
          [&](const RecvB& x) { return recv_b(x.from, rewrite_kth(x.cont, k, fn)); },
          [&](const SelectB& x) {
            return select_b(x.to, x.label, rewrite_kth(x.cont, k, fn));
          },
          [&](const OfferB& x) {
            std::vector<std::pair<Label, BehaviourPtr>> branches;
            for (const auto& [label, body] : x.branches)
              branches.emplace_back(label, rewrite_kth(body, k, fn));
            return offer_b(x.from, std::move(branches));
          },
          [&](const CondB& x) {
            auto t = rewrite_kth(x.then_branch, k, fn);
            auto e = rewrite_kth(x.else_branch, k, fn);
            return cond_b(x.expr, std::move(t), std::move(e));
          },
      },
      b->node());
}

int count_term_actions(const ProcessTerm& t) {
  int n = count_actions(t.main);
  for (const auto& [name, body] : *t.defs) n += count_actions(body);
  return n;
}

// Positions range over main first, then definitions in name order.
ProcessTerm rewrite_term_action(const ProcessTerm& t, int k, const ActionFn& fn) {
  BehaviourPtr main = rewrite_kth(t.main, k, fn);
  BehaviourDefs defs;
  for (const auto& [name, body] : *t.defs) defs.emplace(name, rewrite_kth(body, k, fn));
  return make_process_term(std::move(defs), std::move(main));
}

}  // namespace

Network fuzz(const Network& n, const FuzzParams& p) {
  if (p.deletions < 0 || p.swaps < 0) throw ValidationError("fuzz parameters must be non-negative");
  if (p.deletions == 0 && p.swaps == 0) return n;

  Rng rng(p.seed);
  const int need = std::max(p.deletions, 1);
  std::vector<ProcessName> eligible;
  for (const auto& [name, term] : n.processes)
    if (count_term_actions(term) >= need) eligible.push_back(name);
  if (eligible.empty()) throw NothingToFuzz("no process has enough actions to fuzz");

  ProcessName target = eligible[rng.next(eligible.size())];
  ProcessTerm term = n.processes.at(target);
  for (int i = 0; i < p.deletions; ++i) {
    int total = count_term_actions(term);
    if (total == 0) break;
    term = rewrite_term_action(term, static_cast<int>(rng.next(total)), delete_action);
  }
  for (int i = 0; i < p.swaps; ++i) {
    int total = count_term_actions(term);
    if (total == 0) break;
    term = rewrite_term_action(term, static_cast<int>(rng.next(total)), swap_action);
  }

  Network out = n;
  out.processes.at(target) = std::move(term);
  return out;
}

// ---------------------------------------------------------------------------
// Unroller

namespace {

int count_calls(const BehaviourPtr& b) {
  return std::visit(Match{
                        [&](const DoneB&) { return 0; },
                        [&](const CallB&) { return 1; },
                        [&](const SendB& x) { return count_calls(x.cont); },
                        [&](const RecvB& x) { return count_calls(x.cont); },
                        [&](const SelectB& x) { return count_calls(x.cont); },
                        [&](const OfferB& x) {
                          int n = 0;
                          for (const auto& [label, body] : x.branches) n += count_calls(body);
                          return n;
                        },
                        [&](const CondB& x) {
                          return count_calls(x.then_branch) + count_calls(x.else_branch);
                        },
                    },
                    b->node());
}

using CallFn = std::function<BehaviourPtr(const CallB&)>;

BehaviourPtr rewrite_kth_call(const BehaviourPtr& b, int& k, const CallFn& fn) {
  if (k < 0) return b;
  return std::visit(
      Match{
          [&](const DoneB&) { return b; },
          [&](const CallB& x) {
            if (k-- == 0) return fn(x);
            return b;
          },
          [&](const SendB& x) { return send_b(x.to, x.expr, rewrite_kth_call(x.cont, k, fn)); },
          [&](const RecvB& x) { return recv_b(x.from, rewrite_kth_call(x.cont, k, fn)); },
          [&](const SelectB& x) {
            return select_b(x.to, x.label, rewrite_kth_call(x.cont, k, fn));
          },
          [&](const OfferB& x) {
            std::vector<std::pair<Label, BehaviourPtr>> branches;
            for (const auto& [label, body] : x.branches)
              branches.emplace_back(label, rewrite_kth_call(body, k, fn));
            return offer_b(x.from, std::move(branches));
          },
          [&](const CondB& x) {
            auto t = rewrite_kth_call(x.then_branch, k, fn);
            auto e = rewrite_kth_call(x.else_branch, k, fn);
            return cond_b(x.expr, std::move(t), std::move(e));
          },
      },
      b->node());
}

BehaviourPtr replace_calls(const BehaviourPtr& b, const ProcedureName& x,
                           const std::function<BehaviourPtr()>& make) {
  return std::visit(
      Match{
          [&](const DoneB&) { return b; },
          [&](const CallB& c) { return c.name == x ? make() : b; },
          [&](const SendB& s) { return send_b(s.to, s.expr, replace_calls(s.cont, x, make)); },
          [&](const RecvB& s) { return recv_b(s.from, replace_calls(s.cont, x, make)); },
          [&](const SelectB& s) {
            return select_b(s.to, s.label, replace_calls(s.cont, x, make));
          },
          [&](const OfferB& s) {
            std::vector<std::pair<Label, BehaviourPtr>> branches;
            for (const auto& [label, body] : s.branches)
              branches.emplace_back(label, replace_calls(body, x, make));
            return offer_b(s.from, std::move(branches));
          },
          [&](const CondB& s) {
            auto t = replace_calls(s.then_branch, x, make);
            auto e = replace_calls(s.else_branch, x, make);
            return cond_b(s.expr, std::move(t), std::move(e));
          },
      },
      b->node());
}

// Linear tail-recursive body: a1; ...; ak; X where every a_i is a prefix
// action. Returns the a_i nodes in order.
std::optional<std::vector<BehaviourPtr>> linear_chain(const BehaviourPtr& body,
                                                      const ProcedureName& self) {
  std::vector<BehaviourPtr> chain;
  BehaviourPtr cur = body;
  for (;;) {
    if (const auto* call = std::get_if<CallB>(&cur->node()))
      return call->name == self ? std::optional(chain) : std::nullopt;
    if (std::holds_alternative<SendB>(cur->node()) || std::holds_alternative<RecvB>(cur->node()) ||
        std::holds_alternative<SelectB>(cur->node())) {
      chain.push_back(cur);
      cur = first_cont(*cur);
      continue;
    }
    return std::nullopt;
  }
}

BehaviourPtr build_seq(const std::vector<BehaviourPtr>& prefixes, BehaviourPtr tail) {
  for (auto it = prefixes.rbegin(); it != prefixes.rend(); ++it)
    tail = with_first_cont(**it, std::move(tail));
  return tail;
}

}  // namespace

Network unroll_transform(const Network& n, const UnrollParams& p) {
  if (p.unfoldings < 0 || p.shifts < 0)
    throw ValidationError("unroll parameters must be non-negative");
  if (p.unfoldings == 0 && p.shifts == 0) return n;

  Rng rng(p.seed);
  std::vector<ProcessName> eligible;
  for (const auto& [name, term] : n.processes)
    if (!term.defs->empty()) eligible.push_back(name);
  if (eligible.empty()) throw NothingToUnroll("no process has procedures");

  ProcessName target = eligible[rng.next(eligible.size())];
  ProcessTerm term = n.processes.at(target);

  for (int i = 0; i < p.unfoldings; ++i) {
    int total = count_calls(term.main);
    std::vector<std::pair<ProcedureName, int>> def_counts;
    for (const auto& [name, body] : *term.defs) {
      def_counts.emplace_back(name, count_calls(body));
      total += def_counts.back().second;
    }
    if (total == 0) break;
    int k = static_cast<int>(rng.next(total));
    auto defs_snapshot = term.defs;
    CallFn unfold = [&defs_snapshot](const CallB& c) -> BehaviourPtr {
      auto it = defs_snapshot->find(c.name);
      if (it == defs_snapshot->end())
        throw ValidationError("call to undefined procedure '" + c.name + "'");
      return it->second;
    };
    BehaviourPtr main = rewrite_kth_call(term.main, k, unfold);
    BehaviourDefs defs;
    for (const auto& [name, body] : *term.defs) defs.emplace(name, rewrite_kth_call(body, k, unfold));
    term = make_process_term(std::move(defs), std::move(main));
  }

  for (int i = 0; i < p.shifts; ++i) {
    std::vector<std::pair<ProcedureName, std::vector<BehaviourPtr>>> loops;
    for (const auto& [name, body] : *term.defs) {
      auto chain = linear_chain(body, name);
      if (chain && chain->size() >= 2) loops.emplace_back(name, std::move(*chain));
    }
    if (loops.empty()) break;  // no rotatable loop in this process
    const auto& [x, chain] = loops[rng.next(loops.size())];
    std::size_t cut = 1 + rng.next(chain.size() - 1);

    std::vector<BehaviourPtr> head(chain.begin(), chain.begin() + cut);
    std::vector<BehaviourPtr> rest(chain.begin() + cut, chain.end());
    std::vector<BehaviourPtr> rotated = rest;
    rotated.insert(rotated.end(), head.begin(), head.end());

    // Every call site outside the rotated body replays the shifted prefix.
    auto compensate = [&]() { return build_seq(head, call_b(x)); };
    BehaviourPtr main = replace_calls(term.main, x, compensate);
    BehaviourDefs defs;
    for (const auto& [name, body] : *term.defs) {
      if (name == x)
        defs.emplace(name, build_seq(rotated, call_b(x)));
      else
        defs.emplace(name, replace_calls(body, x, compensate));
    }
    term = make_process_term(std::move(defs), std::move(main));
  }

  Network out = n;
  out.processes.at(target) = std::move(term);
  return out;
}

}  // namespace chorex

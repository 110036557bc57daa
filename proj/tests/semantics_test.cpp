#include <doctest.h>

#include <algorithm>

#include "chorex/projection.hpp"
#include "chorex/semantics.hpp"
#include "chorex/testgen.hpp"
#include "support.hpp"

using namespace chorex;

namespace {

bool has_violation(const std::vector<Violation>& vs, const ProcessName& p, ViolationKind k) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const Violation& v) { return v.process == p && v.kind == k; });
}

// Independent oracle for enabled actions: pair up every combination of
// process heads by brute force.
std::vector<Action> head_pairing_oracle(const Network& n) {
  std::map<ProcessName, BehaviourPtr> heads;
  for (const auto& [name, term] : n.processes) heads[name] = head_normalize(term).head;
  std::vector<Action> out;
  for (const auto& [p, hp] : heads) {
    if (const auto* cond = std::get_if<CondB>(&hp->node())) {
      out.push_back(conditional(p, cond->expr));
      continue;
    }
    for (const auto& [q, hq] : heads) {
      if (p == q) continue;
      const auto* send = std::get_if<SendB>(&hp->node());
      const auto* recv = std::get_if<RecvB>(&hq->node());
      if (send && recv && send->to == q && recv->from == p)
        out.push_back(communication(p, send->expr, q));
      const auto* sel = std::get_if<SelectB>(&hp->node());
      const auto* offer = std::get_if<OfferB>(&hq->node());
      if (sel && offer && sel->to == q && offer->from == p) {
        for (const auto& [label, body] : offer->branches)
          if (label == sel->label) out.push_back(selection(p, q, label));
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("ring is well-formed") { CHECK(well_formed(test::ring()).empty()); }

TEST_CASE("self-communication is a violation") {
  Network n = parse_network("p { main { p!<x>; stop } }");
  auto vs = well_formed(n);
  REQUIRE(vs.size() == 1);
  CHECK(has_violation(vs, "p", ViolationKind::SelfCommunication));
}

TEST_CASE("unknown partner and undefined procedure are violations") {
  auto vs = well_formed(parse_network("p { main { q!<x>; X } }"));
  CHECK(has_violation(vs, "p", ViolationKind::UnknownPartner));
  CHECK(has_violation(vs, "p", ViolationKind::UndefinedProcedure));
}

TEST_CASE("bare-call cycles are violations and match the unfold oracle") {
  Network n = parse_network("p { def X { Y } def Y { X } main { X } }");
  auto vs = well_formed(n);
  REQUIRE(vs.size() == 1);
  CHECK(has_violation(vs, "p", ViolationKind::UnproductiveCallCycle));
  // oracle: head normalization must diverge (bounded unfolds, then error)
  CHECK_THROWS_AS(head_normalize(n.processes.at("p")), CycleError);

  // a bare call *chain* that terminates is fine
  Network ok = parse_network("p { def X { Y } def Y { q!<e>; X } main { X } } |"
                             "q { def Z { p?; Z } main { Z } }");
  CHECK(well_formed(ok).empty());
  CHECK_FALSE(std::holds_alternative<CallB>(head_normalize(ok.processes.at("p")).head->node()));
}

TEST_CASE("head_normalize") {
  Network n = parse_network("p { main { q!<x>; stop } } | q { main { p?; stop } }");
  auto hn = head_normalize(n.processes.at("p"));
  CHECK_FALSE(hn.unfolded);
  CHECK(std::holds_alternative<SendB>(hn.head->node()));

  auto ring = test::ring();
  auto hp = head_normalize(ring.processes.at("p"));
  CHECK(hp.unfolded);
  const auto& send = std::get<SendB>(hp.head->node());
  CHECK(send.to == "q");
  CHECK(std::holds_alternative<CallB>(send.cont->node()));
}

TEST_CASE("enabled actions of the ring, in process order") {
  auto actions = enabled_actions(test::ring());
  REQUIRE(actions.size() == 2);
  CHECK(actions[0] == communication("p", "*", "q"));
  CHECK(actions[1] == communication("r", "*", "s"));
}

TEST_CASE("terminated network has no actions") {
  CHECK(enabled_actions(parse_network("p { main { stop } } | q { main { stop } }")).empty());
}

TEST_CASE("selection is enabled only through a matching offer branch") {
  Network n = parse_network(
      "p { main { q + L; stop } } | q { main { p&{L: stop, R: stop} } }");
  auto actions = enabled_actions(n);
  REQUIRE(actions.size() == 1);
  CHECK(actions[0] == selection("p", "q", "L"));

  Network miss = parse_network("p { main { q + M; stop } } | q { main { p&{L: stop} } }");
  CHECK(enabled_actions(miss).empty());
}

TEST_CASE("enabled actions agree with the head-pairing oracle") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    GenParams params{4, 10, 2, 1, seed};
    Network n = project(amend(generate(params)));
    std::vector<Action> got = enabled_actions(n);
    std::vector<Action> expected = head_pairing_oracle(n);
    REQUIRE(got.size() == expected.size());
    for (const auto& a : expected)
      CHECK(std::count(got.begin(), got.end(), a) == 1);
  }
}

TEST_CASE("reduce marks the involved processes and erases when all live are marked") {
  Network n = test::ring();
  Marking m = initial_marking(n, {});

  Reduced first = reduce(n, m, communication("p", "*", "q"));
  CHECK_FALSE(first.erased);
  CHECK(first.marking.marked.at("p"));
  CHECK(first.marking.marked.at("q"));
  CHECK_FALSE(first.marking.marked.at("r"));

  Reduced second = reduce(first.network, first.marking, communication("r", "*", "s"));
  CHECK(second.erased);
  for (const auto& [name, marked] : second.marking.marked) CHECK_FALSE(marked);
  CHECK(second.network == n);  // loop closed
}

TEST_CASE("termination makes erasure vacuous") {
  Network n = parse_network("p { main { if e then { stop } else { stop } } }");
  Marking m = initial_marking(n, {});
  Reduced r = reduce(n, m, conditional("p", "e"), CondBranch::Then);
  CHECK(r.erased);
  CHECK(std::holds_alternative<DoneB>(r.network.processes.at("p").main->node()));
}

TEST_CASE("erased flag matches the all-live-marked predicate for every marking") {
  Network n = parse_network(
      "p { main { q!<x>; stop } } | q { main { p?; stop } } | r { main { s?; stop } } |"
      "s { main { r!<y>; stop } }");
  std::vector<ProcessName> names{"p", "q", "r", "s"};
  for (int bits = 0; bits < 16; ++bits) {
    Marking m = initial_marking(n, {});
    for (int i = 0; i < 4; ++i) m.marked[names[i]] = (bits >> i) & 1;
    Reduced r = reduce(n, m, communication("p", "x", "q"));
    // p, q advance to stop; erasure depends only on r and s being marked
    bool expect = m.marked.at("r") && m.marked.at("s");
    CHECK(r.erased == expect);
  }
}

TEST_CASE("services stay marked across erasure") {
  Network n = test::ring();
  Marking m = initial_marking(n, {"p"});
  CHECK(m.marked.at("p"));
  Reduced first = reduce(n, m, communication("p", "*", "q"));
  Reduced second = reduce(first.network, first.marking, communication("r", "*", "s"));
  CHECK(second.erased);
  CHECK(second.marking.marked.at("p"));  // service
  CHECK_FALSE(second.marking.marked.at("q"));
}

TEST_CASE("communication graph of the ring") {
  auto g = communication_graph(test::ring());
  CHECK(g.at("p") == std::set<ProcessName>{"q"});
  CHECK(g.at("q") == std::set<ProcessName>{"p"});
  CHECK(g.at("r") == std::set<ProcessName>{"s"});
  CHECK(g.at("s") == std::set<ProcessName>{"r"});
}

TEST_CASE("communication graph of a single process and a star") {
  auto single = communication_graph(parse_network("p { main { stop } }"));
  CHECK(single.at("p").empty());

  Network star = parse_network(
      "p { main { q!<a>; r!<b>; s!<c>; stop } } | q { main { p?; stop } } |"
      "r { main { p?; stop } } | s { main { p?; stop } }");
  auto g = communication_graph(star);
  CHECK(g.at("p") == std::set<ProcessName>{"q", "r", "s"});
  CHECK(g.at("q") == std::set<ProcessName>{"p"});
  CHECK(split_components(star).size() == 1);
}

TEST_CASE("split_components partitions the ring by least process name") {
  auto comps = split_components(test::ring());
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].processes.count("p"));
  CHECK(comps[0].processes.count("q"));
  CHECK(comps[1].processes.count("r"));
  CHECK(comps[1].processes.count("s"));
}

TEST_CASE("split_components agrees with a union-find oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenParams params{6, 12, 0, 1, seed};
    Network n = project(amend(generate(params)));
    // union-find over communication edges
    std::map<ProcessName, ProcessName> parent;
    for (const auto& [name, term] : n.processes) parent[name] = name;
    std::function<ProcessName(ProcessName)> find = [&](ProcessName x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [p, adj] : communication_graph(n))
      for (const auto& q : adj) parent[find(p)] = find(q);
    std::set<ProcessName> roots;
    for (const auto& [name, term] : n.processes) roots.insert(find(name));

    auto comps = split_components(n);
    CHECK(comps.size() == roots.size());
    std::size_t total = 0;
    for (const auto& c : comps) {
      total += c.processes.size();
      // each component maps to exactly one root
      std::set<ProcessName> comp_roots;
      for (const auto& [name, term] : c.processes) comp_roots.insert(find(name));
      CHECK(comp_roots.size() == 1);
    }
    CHECK(total == n.processes.size());
  }
}

TEST_CASE("chor_enabled allows independent actions out of order") {
  Choreography c =
      parse_choreography("main { p.e -> q; r.f -> s; stop }").components[0];
  auto moves = chor_enabled(c);
  REQUIRE(moves.size() == 2);
  CHECK(to_string(moves[0].first) == "p.e->q");
  CHECK(to_string(moves[1].first) == "r.f->s");
  // executing the second action deletes it in place
  CHECK(print_chor_body(*moves[1].second.main) == "p.e -> q; stop");
}

TEST_CASE("chor_enabled of the terminated choreography is empty") {
  CHECK(chor_enabled(parse_choreography("main { stop }").components[0]).empty());
}

TEST_CASE("a conditional blocks its decider and everything behind it") {
  Choreography c = parse_choreography(
                       "main { p.e -> q; if p.f then { stop } else { stop } }")
                       .components[0];
  auto moves = chor_enabled(c);
  REQUIRE(moves.size() == 1);  // the conditional shares p with the communication
  CHECK(to_string(moves[0].first) == "p.e->q");

  Choreography c2 = parse_choreography(
                        "main { p.e -> q; if r.f then { r.g -> s; stop } else { stop } }")
                        .components[0];
  auto moves2 = chor_enabled(c2);
  REQUIRE(moves2.size() == 3);  // communication plus then/else of an independent decider
  CHECK(to_string(moves2[1].first) == "r.f:then");
  CHECK(to_string(moves2[2].first) == "r.f:else");
  // nothing behind the conditional is offered
  for (const auto& [label, succ] : moves2) CHECK(to_string(label) != "r.g->s");
}

TEST_CASE("chor_enabled sees through trailing procedure calls") {
  Choreography c = parse_choreography(
                       "def X { r.f -> s; X } main { p.e -> q; X }")
                       .components[0];
  auto moves = chor_enabled(c);
  REQUIRE(moves.size() == 2);
  CHECK(to_string(moves[1].first) == "r.f->s");
  // the unfolding materializes in the successor
  CHECK(print_chor_body(*moves[1].second.main) == "p.e -> q; X");
  // and loops do not unfold forever
  Choreography loop = parse_choreography("def X { p.e -> q; X } main { X }").components[0];
  auto loop_moves = chor_enabled(loop);
  REQUIRE(loop_moves.size() == 1);
  CHECK(print_chor_body(*loop_moves[0].second.main) == "X");
}

TEST_CASE("confluence at desk scale: all maximal runs end in the same network" *
          doctest::timeout(120)) {
  int runs = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    GenParams params{3 + static_cast<int>(seed % 4), 6 + static_cast<int>(seed % 6), 0, 0, seed};
    Network n = project(generate(params));
    std::string first;
    test::for_each_maximal_run(n, [&](const Network& terminal) {
      std::string text = print_network(terminal);
      if (first.empty())
        first = text;
      else
        REQUIRE(first == text);
      ++runs;
    });
  }
  CHECK(runs > 50);
}

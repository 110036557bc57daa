#include <doctest.h>

#include "chorex/equivalence.hpp"
#include "chorex/testgen.hpp"
#include "support.hpp"

using namespace chorex;

namespace {

Choreography chor(const std::string& text) {
  return parse_choreography(text).components[0];
}

std::set<std::pair<std::string, std::string>> inverted(
    const std::set<std::pair<std::string, std::string>>& r) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : r) out.emplace(b, a);
  return out;
}

}  // namespace

TEST_CASE("every choreography simulates itself") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Choreography c = generate(GenParams{3, 6, 1, 1, seed});
    SimResult r = bisimilar(c, c, SimOptions{20000});
    CHECK(r.kind == SimKind::Similar);
  }
}

TEST_CASE("the two ring extractions simulate each other") {
  Choreography a = chor("def X1 { p.* -> q; r.* -> s; X1 } main { X1 }");
  Choreography b = chor("def X1 { r.* -> s; p.* -> q; X1 } main { X1 }");
  SimResult r = bisimilar(a, b, SimOptions{});
  CHECK(r.kind == SimKind::Similar);
}

TEST_CASE("a missing transition yields a witness") {
  Choreography a = chor("main { p.x -> q; stop }");
  Choreography b = chor("main { stop }");
  SimResult r = simulates(a, b, SimOptions{});
  REQUIRE(r.kind == SimKind::NotSimilar);
  REQUIRE(r.witness);
  CHECK(r.witness->find("p.x->q") != std::string::npos);
  CHECK(bisimilar(a, b, SimOptions{}).kind == SimKind::NotSimilar);
}

TEST_CASE("one branch of a conditional is simulated in only one direction") {
  Choreography whole = chor("main { if p.e then { stop } else { p.x -> q; stop } }");
  Choreography branch = chor("main { stop }");
  CHECK(simulates(branch, whole, SimOptions{}).kind == SimKind::Similar);
  CHECK(simulates(whole, branch, SimOptions{}).kind == SimKind::NotSimilar);
  CHECK(bisimilar(whole, branch, SimOptions{}).kind == SimKind::NotSimilar);
}

TEST_CASE("terminating directed checks build inverse relations") {
  Choreography a = chor("def X1 { p.* -> q; r.* -> s; X1 } main { X1 }");
  Choreography b = chor("def X1 { r.* -> s; p.* -> q; X1 } main { X1 }");
  SimResult ab = simulates(a, b, SimOptions{});
  SimResult ba = simulates(b, a, SimOptions{});
  REQUIRE(ab.kind == SimKind::Similar);
  REQUIRE(ba.kind == SimKind::Similar);
  CHECK(ab.relation == inverted(ba.relation));
}

TEST_CASE("the final relation does not depend on the worklist order") {
  Choreography a = chor("def X1 { p.* -> q; r.* -> s; X1 } main { X1 }");
  Choreography b = chor("def X1 { r.* -> s; p.* -> q; X1 } main { X1 }");
  SimOptions fifo;
  SimOptions lifo;
  lifo.order = SimOptions::Order::Lifo;
  CHECK(simulates(a, b, fifo).relation == simulates(a, b, lifo).relation);

  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Choreography c = generate(GenParams{3, 7, 0, 1, seed + 600});
    CHECK(simulates(c, c, fifo).relation == simulates(c, c, lifo).relation);
  }
}

TEST_CASE("the pair bound turns into Unknown") {
  // conditional successors are never collapsed by prefix stripping
  Choreography c = chor("main { if p.e then { p.x -> q; stop } else { stop } }");
  SimResult r = bisimilar(c, c, SimOptions{1});
  CHECK(r.kind == SimKind::Unknown);
  CHECK(r.pairs_explored >= 1);

  // the quotient proves straight-line self-similarity within one pair
  Choreography line = chor("main { p.x -> q; r.y -> s; stop }");
  CHECK(bisimilar(line, line, SimOptions{1}).kind == SimKind::Similar);
}

TEST_CASE("programs compose component transitions") {
  Program p = parse_choreography(
      "def X { p.e -> q; X } main { X } || main { a.f -> b; stop }");
  auto moves = program_enabled(p);
  REQUIRE(moves.size() == 2);
  CHECK(to_string(moves[0].first) == "p.e->q");
  CHECK(to_string(moves[1].first) == "a.f->b");
  // executing the second component's action leaves the first untouched
  CHECK(moves[1].second.components[0] == p.components[0]);
  CHECK(bisimilar(p, p, SimOptions{}).kind == SimKind::Similar);
}

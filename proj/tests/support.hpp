#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "chorex/parser.hpp"
#include "chorex/printer.hpp"
#include "chorex/semantics.hpp"
#include "chorex/syntax.hpp"

namespace chorex::test {

inline const char* kRingText = R"(p { def X { q!<*>; X } main { X } } |
q { def Y { p?; Y }   main { Y } } |
r { def Z { s!<*>; Z } main { Z } } |
s { def W { r?; W }   main { W } })";

// A service loop whose exit branch finally serves r.
inline const char* kLivelockExitText =
    R"(p { def X { if e then { q + l; X } else { q + r; r!<e>; stop } } main { X } } |
q { def Y { p&{l: Y, r: stop} } main { Y } } |
r { main { p?; stop } })";

// Both branches loop; r is never served.
inline const char* kLivelockLoopText =
    R"(p { def X { if e then { q + l; X } else { q + r; X } } main { X } } |
q { def Y { p&{l: Y, r: Y} } main { Y } } |
r { main { p?; stop } })";

inline Network ring() { return parse_network(kRingText); }

// Exhaustively runs every maximal conditional-free reduction sequence and
// hands each terminal network to the callback. Checks basic reduction
// invariants along the way.
inline void for_each_maximal_run(const Network& start,
                                 const std::function<void(const Network&)>& on_terminal) {
  std::set<ProcessName> names;
  for (const auto& [name, term] : start.processes) names.insert(name);

  std::function<void(const Network&, const Marking&)> walk = [&](const Network& n,
                                                                 const Marking& m) {
    auto actions = enabled_actions(n);
    if (actions.empty()) {
      on_terminal(n);
      return;
    }
    for (const auto& a : actions) {
      if (a.kind == ActionKind::Conditional)
        throw std::logic_error("oracle only handles conditional-free networks");
      Reduced red = reduce(n, m, a);
      std::set<ProcessName> names2;
      for (const auto& [name, term] : red.network.processes) names2.insert(name);
      if (names2 != names) throw std::logic_error("reduce changed the process set");
      if (red.marking.marked.size() != names.size())
        throw std::logic_error("reduce changed the marking domain");
      if (red.erased) {
        for (const auto& [name, marked] : red.marking.marked)
          if (marked && !red.marking.services.count(name) &&
              !terminated(red.network.processes.at(name)))
            throw std::logic_error("erased marking left a live process marked");
      }
      walk(red.network, red.marking);
    }
  };
  walk(start, initial_marking(start, {}));
}

}  // namespace chorex::test

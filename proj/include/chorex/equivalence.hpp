#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>

#include "chorex/semantics.hpp"
#include "chorex/syntax.hpp"

namespace chorex {

enum class SimKind { Similar, NotSimilar, Unknown };

struct SimOptions {
  std::size_t max_pairs = 100000;
  enum class Order { Fifo, Lifo } order = Order::Fifo;
};

struct SimResult {
  SimKind kind = SimKind::Unknown;
  std::size_t pairs_explored = 0;
  // On NotSimilar: the unmatched transition and the pair it was found at.
  std::optional<std::string> witness;
  // Final relation, as canonical printed pairs (left simulated by right).
  std::set<std::pair<std::string, std::string>> relation;
};

// Can `right` simulate `left`? Worklist over pairs of (program) states,
// deduplicated by canonical printed form; Unknown once max_pairs is hit.
SimResult simulates(const Program& left, const Program& right, const SimOptions& opts = {});
SimResult simulates(const Choreography& left, const Choreography& right,
                    const SimOptions& opts = {});

// Similar iff both directed checks are Similar; mutual simulation of
// deterministic-per-label systems yields a bisimulation.
SimResult bisimilar(const Program& a, const Program& b, const SimOptions& opts = {});
SimResult bisimilar(const Choreography& a, const Choreography& b, const SimOptions& opts = {});

// Enabled transitions of a parallel composition: the union over components,
// each successor replacing its component.
std::vector<std::pair<TransitionLabel, Program>> program_enabled(const Program& p);

}  // namespace chorex

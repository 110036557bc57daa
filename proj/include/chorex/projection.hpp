#pragma once

#include <optional>
#include <set>
#include <string>

#include "chorex/syntax.hpp"

namespace chorex {

// Raised when the projections of two conditional branches cannot be merged.
struct MergeError : std::runtime_error {
  MergeError(ProcessName process, std::string location, std::string reason)
      : std::runtime_error("cannot merge projections at process '" + process + "' (" + location +
                           "): " + reason),
        process(std::move(process)),
        location(std::move(location)),
        reason(std::move(reason)) {}
  ProcessName process;
  std::string location;  // path into the choreography, e.g. "main/then"
  std::string reason;
};

// Partial merge of two local behaviours: defined homomorphically on identical
// head constructors; offers take the union of branches, merging shared labels.
std::optional<BehaviourPtr> merge(const BehaviourPtr& a, const BehaviourPtr& b);

// EndPoint Projection. The network ranges over `processes` when given,
// otherwise over the names occurring in the choreography. Throws MergeError
// when some conditional is not projectable.
Network project(const Choreography& c,
                std::optional<std::set<ProcessName>> processes = std::nullopt);

// Projects every component and joins the (disjoint) networks.
Network project(const Program& p);

// Inserts selections from the decider after conditionals whose branch
// projections fail to merge, repeated to fixpoint. Uses the reserved labels
// `then` / `else`. project(amend(c)) never throws.
Choreography amend(const Choreography& c);
Program amend(const Program& p);

// Number of selections amend would insert (0 iff c is already projectable by
// selection insertion alone).
std::size_t amendment_insertions(const Choreography& before, const Choreography& after);

}  // namespace chorex

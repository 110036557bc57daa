#pragma once

#include <cstdint>
#include <stdexcept>

#include "chorex/syntax.hpp"

namespace chorex {

struct GenParams {
  int processes = 0;
  int actions = 0;       // communications + selections
  int conditionals = 0;  // counted separately from `actions`
  int procedures = 0;
  std::uint64_t seed = 0;
};

struct FuzzParams {
  int deletions = 0;
  int swaps = 0;
  std::uint64_t seed = 0;
};

struct UnrollParams {
  int unfoldings = 0;
  int shifts = 0;
  std::uint64_t seed = 0;
};

struct GenerationExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NothingToFuzz : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NothingToUnroll : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seeded random choreography over processes p1..pN. Exact counts: `actions`
// communication/selection nodes and `conditionals` conditional nodes.
// Outputs where some procedure is unreachable from main are rejected and
// regenerated (bounded retries, then GenerationExhausted).
Choreography generate(const GenParams& p);

// Mutates one uniformly chosen process: d deletions then s swaps of actions
// with their successor. Deleting a conditional keeps the then branch, an
// offer its first branch; swapping the last action deletes it.
Network fuzz(const Network& n, const FuzzParams& p);

// Semantics-preserving mutation of one process: u call unfoldings plus h
// rotations of linear tail-recursive loop bodies with compensated call sites.
Network unroll_transform(const Network& n, const UnrollParams& p);

}  // namespace chorex

#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chorex/extraction.hpp"
#include "chorex/testgen.hpp"

namespace chorex {

// One CSV record of a benchmark run. `extractable` holds true/false for test
// rows and a percentage for per-strategy aggregate rows.
struct BenchRow {
  std::string name;
  std::string strategy;
  double time_msec = 0.0;
  long nodes = 0;
  long badloops = 0;
  std::string extractable;
  std::string failure;
};

std::string to_csv(const BenchRow& row);
std::optional<BenchRow> bench_row_from_csv(const std::string& line);
void write_csv(const std::vector<BenchRow>& rows, std::ostream& os);

struct NamedNetwork {
  std::string name;
  Network network;
};

// One generated test: choreography, its amendment and the projected network.
struct CorpusEntry {
  std::string name;
  GenParams params;
  Choreography original;
  Choreography amended;
  Network network;
};

// Desk-scaled grid over the generation parameters (size, processes, ifs,
// ifs x defs, defs); 310 entries, deterministic in the master seed.
std::vector<CorpusEntry> table2_corpus(std::uint64_t master_seed);

// Two processes running a chain of `conditionals` conditionals, each branch
// synchronised by a selection. Choice paths forbid sharing between branches,
// so the graph grows exponentially with the chain length.
Network conditional_chain_network(int conditionals);

// Renames every process p to p+suffix (keys and partner references).
Network rename_processes(const Network& n, const std::string& suffix);

// Disjoint union of two networks over distinct process names.
Network parallel_compose(const Network& a, const Network& b);

// Presets: "table2-small", "ifs-trend", "examples"; anything else is read as
// a directory of .net files.
std::vector<NamedNetwork> load_suite(const std::string& name_or_dir, std::uint64_t seed);

struct BenchOptions {
  std::vector<Strategy> strategies;
  std::chrono::milliseconds timeout{60000};
  int jobs = 1;
  bool split = true;
};

// Runs every test under every strategy and appends one aggregate row per
// strategy (extractable %, mean time, mean nodes).
std::vector<BenchRow> run_benchmark(const std::vector<NamedNetwork>& suite,
                                    const BenchOptions& options);

}  // namespace chorex

#include "chorex/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chorex/bench.hpp"
#include "chorex/equivalence.hpp"
#include "chorex/extraction.hpp"
#include "chorex/parser.hpp"
#include "chorex/printer.hpp"
#include "chorex/projection.hpp"
#include "chorex/testgen.hpp"

namespace chorex::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::set<ProcessName> parse_name_list(const std::string& csv) {
  std::set<ProcessName> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

Strategy parse_strategy(const std::string& code, std::uint64_t seed) {
  auto kind = strategy_from_code(code);
  if (!kind) throw CLI::ValidationError("--strategy", "unknown strategy code '" + code + "'");
  return Strategy{*kind, seed};
}

int cmd_extract(const std::string& file, const std::string& strategy_code_str,
                const std::string& services_csv, bool no_split, std::uint64_t seed,
                const std::string& dot_path, const std::string& stats_path) {
  Network net = parse_network(read_file(file));
  ExtractOptions options;
  options.strategy = parse_strategy(strategy_code_str, seed);
  options.services = parse_name_list(services_csv);
  options.split = !no_split;
  Extraction result = extract(net, options);

  if (!stats_path.empty()) {
    std::ofstream out(stats_path);
    out << stats_csv_header() << "\n"
        << stats_csv_row(std::filesystem::path(file).stem().string(), options.strategy,
                         result.stats)
        << "\n";
  }
  if (!result.program) {
    std::cerr << "extraction failed: " << to_string(*result.stats.failure) << "\n";
    for (const auto& v : result.violations) std::cerr << "  " << to_string(v) << "\n";
    return 1;
  }
  if (!dot_path.empty()) {
    std::ofstream out(dot_path);
    for (std::size_t i = 0; i < result.graphs.size(); ++i)
      out << seg_to_dot(result.graphs[i], "component" + std::to_string(i));
  }
  std::cout << print_program(*result.program) << "\n";
  return 0;
}

int cmd_project(const std::string& file, bool no_amend, const std::string& procs_csv,
                bool verbose, const std::string& amended_out) {
  Program program = parse_choreography(read_file(file));
  std::set<ProcessName> explicit_procs = parse_name_list(procs_csv);
  if (!explicit_procs.empty() && program.components.size() > 1)
    throw CLI::ValidationError("--processes", "only supported for single-component programs");
  try {
    Network net = [&] {
      if (!no_amend) {
        Program amended = amend(program);
        if (verbose) {
          std::size_t inserted = 0;
          for (std::size_t i = 0; i < program.components.size(); ++i)
            inserted += amendment_insertions(program.components[i], amended.components[i]);
          std::cerr << "amendment inserted " << inserted << " selection(s)\n";
        }
        if (!amended_out.empty()) {
          std::ofstream out(amended_out);
          out << print_program(amended) << "\n";
        }
        program = std::move(amended);
      }
      if (!explicit_procs.empty()) return project(program.components[0], explicit_procs);
      return project(program);
    }();
    std::cout << print_network(net) << "\n";
    return 0;
  } catch (const MergeError& e) {
    std::cerr << "projection failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_generate(int processes, int actions, int ifs, int defs, int count, std::uint64_t seed,
                 const std::string& out_dir, const std::string& prefix) {
  if (out_dir.empty() && count != 1)
    throw CLI::ValidationError("--out", "writing more than one choreography needs --out");
  for (int i = 0; i < count; ++i) {
    GenParams params{processes, actions, ifs, defs, seed + static_cast<std::uint64_t>(i)};
    Choreography c = generate(params);
    if (out_dir.empty()) {
      std::cout << print_choreography(c) << "\n";
    } else {
      std::filesystem::create_directories(out_dir);
      std::ostringstream name;
      name << prefix << "_" << std::setw(3) << std::setfill('0') << i << ".chor";
      std::ofstream out(std::filesystem::path(out_dir) / name.str());
      out << print_choreography(c) << "\n";
    }
  }
  return 0;
}

int cmd_fuzz(const std::string& file, int deletions, int swaps, std::uint64_t seed) {
  Network net = parse_network(read_file(file));
  std::cout << print_network(fuzz(net, FuzzParams{deletions, swaps, seed})) << "\n";
  return 0;
}

int cmd_unroll(const std::string& file, int unfoldings, int shifts, std::uint64_t seed) {
  Network net = parse_network(read_file(file));
  std::cout << print_network(unroll_transform(net, UnrollParams{unfoldings, shifts, seed})) << "\n";
  return 0;
}

int cmd_simcheck(const std::string& left_file, const std::string& right_file,
                 std::size_t max_pairs) {
  Program left = parse_choreography(read_file(left_file));
  Program right = parse_choreography(read_file(right_file));
  SimOptions options;
  options.max_pairs = max_pairs;
  SimResult result = bisimilar(left, right, options);
  switch (result.kind) {
    case SimKind::Similar:
      std::cout << "similar (" << result.pairs_explored << " pairs)\n";
      return 0;
    case SimKind::NotSimilar:
      std::cout << "not similar\n";
      if (result.witness) std::cerr << "unmatched transition: " << *result.witness << "\n";
      return 1;
    case SimKind::Unknown:
      std::cout << "unknown (" << result.pairs_explored << " pairs explored)\n";
      return 2;
  }
  return 2;
}

int cmd_split(const std::string& file, const std::string& out_prefix) {
  Network net = parse_network(read_file(file));
  std::vector<Network> components = split_components(net);
  if (out_prefix.empty()) {
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (i) std::cout << "---\n";
      std::cout << print_network(components[i]) << "\n";
    }
  } else {
    for (std::size_t i = 0; i < components.size(); ++i) {
      std::ofstream out(out_prefix + std::to_string(i) + ".net");
      out << print_network(components[i]) << "\n";
    }
  }
  return 0;
}

int cmd_bench(const std::string& suite_name, const std::string& strategies_csv,
              const std::string& out_path, long timeout_ms, int jobs, std::uint64_t seed,
              bool no_split) {
  std::vector<NamedNetwork> suite = load_suite(suite_name, seed);
  BenchOptions options;
  if (strategies_csv.empty()) {
    for (auto kind : all_strategies()) options.strategies.push_back({kind, seed});
  } else {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) options.strategies.push_back(parse_strategy(cur, seed));
      cur.clear();
    };
    for (char c : strategies_csv) {
      if (c == ',')
        flush();
      else
        cur += c;
    }
    flush();
  }
  options.timeout = std::chrono::milliseconds(timeout_ms);
  options.jobs = jobs;
  options.split = !no_split;
  std::vector<BenchRow> rows = run_benchmark(suite, options);
  if (out_path.empty()) {
    write_csv(rows, std::cout);
  } else {
    std::ofstream out(out_path);
    write_csv(rows, out);
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"choreography extraction toolkit"};
  app.require_subcommand(1);

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "extract a choreography from a network");
  std::string extract_file, extract_strategy = "I", extract_services, extract_dot, extract_stats;
  bool extract_no_split = false;
  std::uint64_t extract_seed = 0;
  extract_cmd->add_option("file", extract_file, "network file (.net)")->required();
  extract_cmd->add_option("--strategy", extract_strategy,
                          "R|L|S|I|C|U|UI|US|UC|UR (default I)");
  extract_cmd->add_option("--services", extract_services, "comma-separated service processes");
  extract_cmd->add_flag("--no-split", extract_no_split, "do not split into components");
  extract_cmd->add_option("--seed", extract_seed, "seed for randomized strategies");
  extract_cmd->add_option("--dot", extract_dot, "write the execution graph as DOT");
  extract_cmd->add_option("--stats", extract_stats, "write a one-row stats CSV");

  // project
  auto* project_cmd = app.add_subcommand("project", "project a choreography to a network");
  std::string project_file, project_procs, project_amended_out;
  bool project_no_amend = false, project_verbose = false;
  project_cmd->add_option("file", project_file, "choreography file (.chor)")->required();
  project_cmd->add_flag("--no-amend", project_no_amend, "fail instead of amending");
  project_cmd->add_option("--processes", project_procs, "explicit process set");
  project_cmd->add_flag("--verbose", project_verbose, "report inserted selections");
  project_cmd->add_option("--amended-out", project_amended_out,
                          "also write the amended choreography");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "generate random choreographies");
  int gen_processes = 0, gen_actions = 0, gen_ifs = 0, gen_defs = 0, gen_count = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_prefix = "gen";
  gen_cmd->add_option("--processes", gen_processes, "number of processes")->required();
  gen_cmd->add_option("--actions", gen_actions, "number of communications+selections");
  gen_cmd->add_option("--ifs", gen_ifs, "number of conditionals");
  gen_cmd->add_option("--defs", gen_defs, "number of procedures");
  gen_cmd->add_option("--count", gen_count, "how many to generate");
  gen_cmd->add_option("--seed", gen_seed, "base seed");
  gen_cmd->add_option("--out", gen_out, "output directory");
  gen_cmd->add_option("--prefix", gen_prefix, "output file prefix");

  // fuzz
  auto* fuzz_cmd = app.add_subcommand("fuzz", "mutate one process of a network");
  std::string fuzz_file;
  int fuzz_deletions = 0, fuzz_swaps = 0;
  std::uint64_t fuzz_seed = 0;
  fuzz_cmd->add_option("file", fuzz_file, "network file (.net)")->required();
  fuzz_cmd->add_option("--deletions", fuzz_deletions, "actions to delete");
  fuzz_cmd->add_option("--swaps", fuzz_swaps, "actions to swap with their successor");
  fuzz_cmd->add_option("--seed", fuzz_seed, "seed");

  // unroll
  auto* unroll_cmd = app.add_subcommand("unroll", "apply semantics-preserving loop mutations");
  std::string unroll_file;
  int unroll_unfoldings = 0, unroll_shifts = 0;
  std::uint64_t unroll_seed = 0;
  unroll_cmd->add_option("file", unroll_file, "network file (.net)")->required();
  unroll_cmd->add_option("--unfoldings", unroll_unfoldings, "procedure calls to unfold");
  unroll_cmd->add_option("--shifts", unroll_shifts, "loop closing points to shift");
  unroll_cmd->add_option("--seed", unroll_seed, "seed");

  // simcheck
  auto* sim_cmd = app.add_subcommand("simcheck", "check mutual simulation of two choreographies");
  std::string sim_left, sim_right;
  std::size_t sim_max_pairs = 100000;
  sim_cmd->add_option("left", sim_left, "choreography file")->required();
  sim_cmd->add_option("right", sim_right, "choreography file")->required();
  sim_cmd->add_option("--max-pairs", sim_max_pairs, "bound on explored pairs");

  // split
  auto* split_cmd = app.add_subcommand("split", "split a network into independent components");
  std::string split_file, split_prefix;
  split_cmd->add_option("file", split_file, "network file (.net)")->required();
  split_cmd->add_option("--out-prefix", split_prefix, "write components to <prefix><i>.net");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
  std::string bench_suite, bench_strategies, bench_out;
  long bench_timeout = 60000;
  int bench_jobs = 1;
  std::uint64_t bench_seed = 1;
  bool bench_no_split = false;
  bench_cmd->add_option("--suite", bench_suite, "preset name or directory of .net files")
      ->required();
  bench_cmd->add_option("--strategies", bench_strategies, "comma-separated codes (default all)");
  bench_cmd->add_option("--out", bench_out, "CSV output path (default stdout)");
  bench_cmd->add_option("--timeout-ms", bench_timeout, "per-test timeout");
  bench_cmd->add_option("--jobs", bench_jobs, "concurrent tests");
  bench_cmd->add_option("--seed", bench_seed, "suite/strategy seed");
  bench_cmd->add_flag("--no-split", bench_no_split, "do not split into components");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (extract_cmd->parsed())
      return cmd_extract(extract_file, extract_strategy, extract_services, extract_no_split,
                         extract_seed, extract_dot, extract_stats);
    if (project_cmd->parsed())
      return cmd_project(project_file, project_no_amend, project_procs, project_verbose,
                         project_amended_out);
    if (gen_cmd->parsed())
      return cmd_generate(gen_processes, gen_actions, gen_ifs, gen_defs, gen_count, gen_seed,
                          gen_out, gen_prefix);
    if (fuzz_cmd->parsed()) return cmd_fuzz(fuzz_file, fuzz_deletions, fuzz_swaps, fuzz_seed);
    if (unroll_cmd->parsed())
      return cmd_unroll(unroll_file, unroll_unfoldings, unroll_shifts, unroll_seed);
    if (sim_cmd->parsed()) return cmd_simcheck(sim_left, sim_right, sim_max_pairs);
    if (split_cmd->parsed()) return cmd_split(split_file, split_prefix);
    if (bench_cmd->parsed())
      return cmd_bench(bench_suite, bench_strategies, bench_out, bench_timeout, bench_jobs,
                       bench_seed, bench_no_split);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NothingToFuzz& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const NothingToUnroll& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace chorex::cli

#include "chorex/bench.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "chorex/parser.hpp"
#include "chorex/projection.hpp"

namespace chorex {

std::string to_csv(const BenchRow& row) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << row.name << "," << row.strategy << "," << row.time_msec << "," << row.nodes << ","
     << row.badloops << "," << row.extractable << "," << row.failure;
  return os.str();
}

std::optional<BenchRow> bench_row_from_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 7) return std::nullopt;
  BenchRow row;
  row.name = fields[0];
  row.strategy = fields[1];
  try {
    row.time_msec = std::stod(fields[2]);
    row.nodes = std::stol(fields[3]);
    row.badloops = std::stol(fields[4]);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  row.extractable = fields[5];
  row.failure = fields[6];
  return row;
}

void write_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
  os << stats_csv_header() << "\n";
  for (const auto& row : rows) os << to_csv(row) << "\n";
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<CorpusEntry> table2_corpus(std::uint64_t master_seed) {
  struct GridRow {
    std::string name;
    GenParams params;
    int count;
  };
  std::vector<GridRow> rows;
  for (int k = 1; k <= 8; ++k)
    rows.push_back({"size/k" + std::to_string(k), {6, 50 * k, 0, 0, 0}, 10});
  for (int k = 1; k <= 6; ++k)
    rows.push_back({"procs/k" + std::to_string(k), {5 * k, 100, 0, 0, 0}, 10});
  for (int k = 1; k <= 4; ++k)
    rows.push_back({"ifs/k" + std::to_string(k), {6, 50, 5 * k, 0, 0}, 10});
  for (int j = 0; j <= 5; ++j)
    for (int k = 0; k <= 2; ++k)
      rows.push_back(
          {"ifsdefs/j" + std::to_string(j) + "k" + std::to_string(k), {5, 24, j, 3 * k, 0}, 5});
  for (int k = 1; k <= 8; ++k)
    rows.push_back({"defs/k" + std::to_string(k), {5, 20, 8, k, 0}, 5});

  std::vector<CorpusEntry> out;
  std::uint64_t index = 0;
  for (const auto& row : rows) {
    for (int i = 0; i < row.count; ++i, ++index) {
      CorpusEntry entry;
      entry.name = row.name + "/" + std::to_string(i);
      entry.params = row.params;
      entry.params.seed = master_seed * 0x100000001b3ULL + index;
      entry.original = generate(entry.params);
      entry.amended = amend(entry.original);
      entry.network = project(entry.amended);
      out.push_back(std::move(entry));
    }
  }
  return out;
}

Network conditional_chain_network(int conditionals) {
  if (conditionals < 1) throw ValidationError("chain needs at least one conditional");
  auto step = [&](int i) { return std::to_string(i); };

  BehaviourDefs p_defs;
  BehaviourDefs q_defs;
  for (int i = 1; i <= conditionals; ++i) {
    BehaviourPtr p_next = i < conditionals ? call_b("X" + step(i + 1)) : done_b();
    BehaviourPtr q_next = i < conditionals ? call_b("Y" + step(i + 1)) : done_b();
    p_defs.emplace("X" + step(i),
                   cond_b("e" + step(i), select_b("q", "l" + step(i), p_next),
                          select_b("q", "r" + step(i), p_next)));
    q_defs.emplace("Y" + step(i),
                   offer_b("p", {{"l" + step(i), q_next}, {"r" + step(i), q_next}}));
  }
  std::map<ProcessName, ProcessTerm> procs;
  procs.emplace("p", make_process_term(std::move(p_defs), call_b("X1")));
  procs.emplace("q", make_process_term(std::move(q_defs), call_b("Y1")));
  return make_network(std::move(procs));
}

namespace {

BehaviourPtr rename_partners(const BehaviourPtr& b, const std::string& suffix) {
  return std::visit(
      Match{
          [&](const DoneB&) { return b; },
          [&](const CallB&) { return b; },
          [&](const SendB& x) {
            return send_b(x.to + suffix, x.expr, rename_partners(x.cont, suffix));
          },
          [&](const RecvB& x) { return recv_b(x.from + suffix, rename_partners(x.cont, suffix)); },
          [&](const SelectB& x) {
            return select_b(x.to + suffix, x.label, rename_partners(x.cont, suffix));
          },
          [&](const OfferB& x) {
            std::vector<std::pair<Label, BehaviourPtr>> branches;
            for (const auto& [label, body] : x.branches)
              branches.emplace_back(label, rename_partners(body, suffix));
            return offer_b(x.from + suffix, std::move(branches));
          },
          [&](const CondB& x) {
            return cond_b(x.expr, rename_partners(x.then_branch, suffix),
                          rename_partners(x.else_branch, suffix));
          },
      },
      b->node());
}

}  // namespace

Network rename_processes(const Network& n, const std::string& suffix) {
  std::map<ProcessName, ProcessTerm> procs;
  for (const auto& [name, term] : n.processes) {
    BehaviourDefs defs;
    for (const auto& [def_name, body] : *term.defs)
      defs.emplace(def_name, rename_partners(body, suffix));
    procs.emplace(name + suffix,
                  make_process_term(std::move(defs), rename_partners(term.main, suffix)));
  }
  return make_network(std::move(procs));
}

Network parallel_compose(const Network& a, const Network& b) {
  std::map<ProcessName, ProcessTerm> procs = a.processes;
  for (const auto& [name, term] : b.processes) {
    if (!procs.emplace(name, term).second)
      throw ValidationError("process '" + name + "' occurs in both networks");
  }
  return make_network(std::move(procs));
}

// ---------------------------------------------------------------------------
// Suites

namespace {

const char* kRingText = R"(p { def X { q!<*>; X } main { X } } |
q { def Y { p?; Y } main { Y } } |
r { def Z { s!<*>; Z } main { Z } } |
s { def W { r?; W } main { W } })";

const char* kLivelockText = R"(p { def X { if e then { q + l; X } else { q + r; r!<e>; stop } } main { X } } |
q { def Y { p&{l: Y, r: stop} } main { Y } } |
r { main { p?; stop } })";

std::vector<NamedNetwork> examples_suite() {
  std::vector<NamedNetwork> out;
  out.push_back({"ring", parse_network(kRingText)});
  out.push_back({"livelock", parse_network(kLivelockText)});
  return out;
}

}  // namespace

std::vector<NamedNetwork> load_suite(const std::string& name_or_dir, std::uint64_t seed) {
  if (name_or_dir == "table2-small") {
    std::vector<NamedNetwork> out;
    for (auto& entry : table2_corpus(seed)) out.push_back({entry.name, std::move(entry.network)});
    return out;
  }
  if (name_or_dir == "ifs-trend") {
    std::vector<NamedNetwork> out;
    for (int f : {4, 8, 16})
      out.push_back({"chain/f" + std::to_string(f), conditional_chain_network(f)});
    return out;
  }
  if (name_or_dir == "examples") return examples_suite();

  namespace fs = std::filesystem;
  if (!fs::is_directory(name_or_dir))
    throw std::runtime_error("unknown suite or directory: " + name_or_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(name_or_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".net")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedNetwork> out;
  for (const auto& file : files) {
    std::ifstream in(file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    out.push_back({file.stem().string(), parse_network(buffer.str())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Harness

std::vector<BenchRow> run_benchmark(const std::vector<NamedNetwork>& suite,
                                    const BenchOptions& options) {
  struct Job {
    std::size_t test;
    std::size_t strategy;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < suite.size(); ++t)
    for (std::size_t s = 0; s < options.strategies.size(); ++s) jobs.push_back({t, s});

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const auto& job = jobs[i];
      const auto& test = suite[job.test];
      ExtractOptions eo;
      eo.strategy = options.strategies[job.strategy];
      eo.split = options.split;
      eo.timeout = options.timeout;
      Extraction result = extract(test.network, eo);
      BenchRow row;
      row.name = test.name;
      row.strategy = strategy_code(eo.strategy.kind);
      row.time_msec = result.stats.elapsed_ms;
      row.nodes = result.stats.nodes_created;
      row.badloops = result.stats.bad_loop_hits;
      row.extractable = result.stats.extractable ? "true" : "false";
      row.failure = result.stats.failure ? to_string(*result.stats.failure) : "";
      rows[i] = std::move(row);
    }
  };
  int nthreads = std::max(1, options.jobs);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Per-strategy aggregates at the end.
  for (const auto& strategy : options.strategies) {
    std::string code = strategy_code(strategy.kind);
    long total = 0, ok = 0, nodes = 0, badloops = 0;
    double time = 0;
    for (const auto& row : rows) {
      if (row.strategy != code || row.name == "aggregate") continue;
      ++total;
      if (row.extractable == "true") ++ok;
      nodes += row.nodes;
      badloops += row.badloops;
      time += row.time_msec;
    }
    if (total == 0) continue;
    BenchRow agg;
    agg.name = "aggregate";
    agg.strategy = code;
    agg.time_msec = time / total;
    agg.nodes = nodes / total;
    agg.badloops = badloops / total;
    std::ostringstream pct;
    pct.setf(std::ios::fixed);
    pct.precision(1);
    pct << (100.0 * ok / total) << "%";
    agg.extractable = pct.str();
    rows.push_back(std::move(agg));
  }
  return rows;
}

}  // namespace chorex

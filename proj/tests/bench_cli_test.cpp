#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "chorex/bench.hpp"
#include "chorex/cli.hpp"
#include "chorex/extraction.hpp"
#include "support.hpp"

using namespace chorex;

namespace {

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  args.insert(args.begin(), "chorex");
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = "/tmp/chorex_test_" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("bench rows round-trip through CSV") {
  BenchRow row{"size/k1/3", "UI", 12.345, 77, 4, "true", ""};
  auto parsed = bench_row_from_csv(to_csv(row));
  REQUIRE(parsed);
  CHECK(parsed->name == row.name);
  CHECK(parsed->strategy == row.strategy);
  CHECK(parsed->time_msec == doctest::Approx(row.time_msec));
  CHECK(parsed->nodes == row.nodes);
  CHECK(parsed->badloops == row.badloops);
  CHECK(parsed->extractable == row.extractable);
  CHECK(parsed->failure == row.failure);
  CHECK_FALSE(bench_row_from_csv("not,a,row"));
}

TEST_CASE("benchmark rows cover every test and strategy plus aggregates") {
  std::vector<NamedNetwork> suite = load_suite("examples", 1);
  REQUIRE(suite.size() == 2);
  BenchOptions options;
  options.strategies = {{StrategyKind::InteractionsFirst, 0}, {StrategyKind::UnmarkedFirst, 0}};
  options.timeout = std::chrono::milliseconds(10000);
  auto rows = run_benchmark(suite, options);
  REQUIRE(rows.size() == 2 * 2 + 2);
  CHECK(rows[0].name == "ring");
  CHECK(rows[0].extractable == "true");
  // the livelock network fails without services
  bool saw_badloop = false;
  for (const auto& row : rows)
    if (row.name == "livelock") {
      CHECK(row.extractable == "false");
      saw_badloop |= row.failure == "BadLoopExhaustion";
    }
  CHECK(saw_badloop);
  CHECK(rows[rows.size() - 2].name == "aggregate");
  CHECK(rows.back().extractable == "50.0%");

  std::ostringstream os;
  write_csv(rows, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == stats_csv_header());
  std::string line;
  std::size_t parsed = 0;
  while (std::getline(is, line))
    if (bench_row_from_csv(line)) ++parsed;
  CHECK(parsed == rows.size());
}

TEST_CASE("an empty suite produces only the header") {
  auto rows = run_benchmark({}, BenchOptions{{{StrategyKind::Random, 0}}});
  CHECK(rows.empty());
  std::ostringstream os;
  write_csv(rows, os);
  CHECK(os.str() == stats_csv_header() + "\n");
}

TEST_CASE("per-test timeouts are recorded") {
  std::vector<NamedNetwork> suite{{"chain", conditional_chain_network(16)}};
  BenchOptions options;
  options.strategies = {{StrategyKind::InteractionsFirst, 0}};
  options.timeout = std::chrono::milliseconds(5);
  options.split = false;
  auto rows = run_benchmark(suite, options);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].extractable == "false");
  CHECK(rows[0].failure == "Timeout");
}

TEST_CASE("parallel jobs preserve row order") {
  std::vector<NamedNetwork> suite = load_suite("ifs-trend", 1);
  suite.pop_back();  // keep it quick: f4 and f8 only
  BenchOptions options;
  options.strategies = {{StrategyKind::InteractionsFirst, 0}};
  options.split = false;
  options.jobs = 4;
  auto rows = run_benchmark(suite, options);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].name == "chain/f4");
  CHECK(rows[1].name == "chain/f8");
  CHECK(rows[0].nodes == 61);
  CHECK(rows[1].nodes == 1021);
}

TEST_CASE("doubling a protocol doubles split extraction exactly") {
  Network a = parse_network(
      "p { def X { q!<a>; q!<b>; X } main { X } } | q { def Y { p?; p?; Y } main { Y } }");
  Network b = rename_processes(a, "2");
  Network both = parallel_compose(a, b);

  ExtractOptions opt;
  opt.strategy = {StrategyKind::InteractionsFirst, 0};
  opt.split = false;
  long nodes_a = extract(a, opt).stats.nodes_created;
  long nodes_b = extract(b, opt).stats.nodes_created;

  ExtractOptions split_opt = opt;
  split_opt.split = true;
  Extraction split_both = extract(both, split_opt);
  REQUIRE(split_both.program);
  CHECK(split_both.stats.nodes_created == nodes_a + nodes_b);

  Extraction serial_both = extract(both, opt);
  REQUIRE(serial_both.program);
  CHECK(serial_both.stats.nodes_created > nodes_a + nodes_b);
}

TEST_CASE("the table2 corpus has the documented shape") {
  auto corpus = table2_corpus(1);
  CHECK(corpus.size() == 310);
  std::map<std::string, int> by_row;
  for (const auto& entry : corpus) ++by_row[entry.name.substr(0, entry.name.find('/'))];
  CHECK(by_row.at("size") == 80);
  CHECK(by_row.at("procs") == 60);
  CHECK(by_row.at("ifs") == 40);
  CHECK(by_row.at("ifsdefs") == 90);
  CHECK(by_row.at("defs") == 40);
  // deterministic in the master seed
  auto corpus2 = table2_corpus(1);
  CHECK(corpus2[17].network == corpus[17].network);
}

TEST_CASE("cli: extract, services, simcheck and error paths") {
  std::string ring = write_temp("ring.net", test::kRingText);
  std::string livelock = write_temp("livelock.net", test::kLivelockExitText);
  std::string chor_a = write_temp("a.chor", "def X1 { p.* -> q; r.* -> s; X1 } main { X1 }");
  std::string chor_b = write_temp("b.chor", "def X1 { r.* -> s; p.* -> q; X1 } main { X1 }");
  std::string chor_c = write_temp("c.chor", "main { stop }");
  std::string broken = write_temp("broken.net", "p { main stop }");

  CHECK(run_cli({"extract", ring, "--strategy", "I", "--dot", "/tmp/chorex_test_ring.dot",
                 "--stats", "/tmp/chorex_test_ring.csv"}) == 0);
  std::ifstream dot("/tmp/chorex_test_ring.dot");
  CHECK(dot.good());
  std::ifstream csv("/tmp/chorex_test_ring.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == stats_csv_header());

  CHECK(run_cli({"extract", livelock}) == 1);
  CHECK(run_cli({"extract", livelock, "--services", "r"}) == 0);
  CHECK(run_cli({"extract", broken}) == 2);
  CHECK(run_cli({"extract", "/tmp/chorex_test_nosuch.net"}) == 2);
  CHECK(run_cli({"extract", ring, "--strategy", "Z"}) == 2);

  CHECK(run_cli({"simcheck", chor_a, chor_b}) == 0);
  CHECK(run_cli({"simcheck", chor_a, chor_c}) == 1);
  std::string chor_d =
      write_temp("d.chor", "main { if p.e then { p.x -> q; stop } else { stop } }");
  CHECK(run_cli({"simcheck", chor_d, chor_d, "--max-pairs", "1"}) == 2);

  CHECK(run_cli({"split", ring, "--out-prefix", "/tmp/chorex_test_comp"}) == 0);
  std::ifstream comp0("/tmp/chorex_test_comp0.net");
  std::stringstream buf;
  buf << comp0.rdbuf();
  CHECK(buf.str().find("p {") != std::string::npos);
  CHECK(buf.str().find("r {") == std::string::npos);

  CHECK(run_cli({"generate", "--processes", "4", "--actions", "6", "--count", "2", "--out",
                 "/tmp/chorex_test_gen", "--seed", "5"}) == 0);
  std::ifstream gen0("/tmp/chorex_test_gen/gen_000.chor");
  CHECK(gen0.good());
  CHECK(run_cli({"generate", "--processes", "4", "--count", "2"}) == 2);  // needs --out

  CHECK(run_cli({"nosuchcommand"}) == 2);
  CHECK(run_cli({}) == 2);
}

TEST_CASE("cli: project, fuzz and unroll write usable outputs") {
  std::string chor = write_temp(
      "proj.chor", "main { if p.e then { q.x -> r; stop } else { r.y -> q; stop } }");
  CHECK(run_cli({"project", chor, "--amended-out", "/tmp/chorex_test_amended.chor"}) == 0);
  CHECK(run_cli({"project", chor, "--no-amend"}) == 1);  // merge failure reported

  std::string ring = write_temp("ring2.net", test::kRingText);
  CHECK(run_cli({"fuzz", ring, "--deletions", "1", "--seed", "4"}) == 0);
  CHECK(run_cli({"unroll", ring, "--unfoldings", "1", "--seed", "4"}) == 0);
  std::string still = write_temp("still.net", "p { main { stop } }");
  CHECK(run_cli({"fuzz", still, "--deletions", "1"}) == 1);
  CHECK(run_cli({"unroll", still, "--unfoldings", "1"}) == 1);
}

TEST_CASE("benchmark runs with a fixed seed are reproducible up to timing") {
  std::vector<NamedNetwork> suite = load_suite("examples", 3);
  BenchOptions options;
  options.strategies = {{StrategyKind::Random, 11}, {StrategyKind::UnmarkedThenRandom, 11}};
  auto a = run_benchmark(suite, options);
  auto b = run_benchmark(suite, options);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].strategy == b[i].strategy);
    CHECK(a[i].nodes == b[i].nodes);
    CHECK(a[i].badloops == b[i].badloops);
    CHECK(a[i].extractable == b[i].extractable);
    CHECK(a[i].failure == b[i].failure);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_workdir;

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with the given arguments, capturing stdout+stderr.
CommandResult run_cli(const std::string& args) {
  fs::path out_file = g_workdir / "cmd_output.txt";
  std::string cmd = g_binary + " " + args + " > " + out_file.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CommandResult result;
#ifdef _WIN32
  result.exit_code = status;
#else
  result.exit_code = WEXITSTATUS(status);
#endif
  std::ifstream in(out_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generate writes a deterministic quota-exact trace") {
  fs::path a = g_workdir / "trace_a.jsonl";
  fs::path b = g_workdir / "trace_b.jsonl";
  auto r1 = run_cli("generate --pattern ide-heavy --rate 10 --duration 30 "
                    "--seed 1 --output " + a.string());
  auto r2 = run_cli("generate --pattern ide-heavy --rate 10 --duration 30 "
                    "--seed 1 --output " + b.string());
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());

  // 70/30 task mix is exact: the census in the output proves the labels.
  std::size_t completion = 0, reasoning = 0, total = 0;
  std::ifstream in(a);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    total += 1;
    if (line.find("\"completion\"") != std::string::npos) completion += 1;
    if (line.find("\"reasoning\"") != std::string::npos) reasoning += 1;
  }
  CHECK(completion + reasoning == total);
  CHECK(completion ==
        static_cast<std::size_t>(std::floor(0.7 * total + 0.5)));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("generate --rate 0").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("compare --format yaml").exit_code == 2);
}

TEST_CASE("runtime errors exit with code 1") {
  auto r = run_cli("simulate --trace " + (g_workdir / "missing.jsonl").string());
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("simulate replays a trace and writes a report") {
  fs::path trace = g_workdir / "sim_trace.jsonl";
  fs::path report = g_workdir / "sim_report.json";
  REQUIRE(run_cli("generate --pattern uniform --rate 5 --duration 10 --seed 2 "
                  "--output " + trace.string()).exit_code == 0);
  auto r = run_cli("simulate --trace " + trace.string() + " --policy cace " +
                   "--output " + report.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("hit_rate=") != std::string::npos);
  std::string body = slurp(report);
  CHECK(body.find("\"report_version\": 1") != std::string::npos);
}

TEST_CASE("compare produces summary, comparison, and per-seed reports") {
  fs::path out = g_workdir / "cmp_out";
  auto r = run_cli("compare --patterns uniform --variants lru,cace "
                   "--seeds 1,2 --rate 5 --duration 10 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("pattern,variant,", 0) == 0);
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "comparison.csv"));
  CHECK(fs::exists(out / "reports" / "uniform_lru_seed1.json"));
  CHECK(fs::exists(out / "reports" / "uniform_cace_seed2.json"));

  // The grid is deterministic: a serial re-run emits identical bytes.
  fs::path out2 = g_workdir / "cmp_out2";
  auto r2 = run_cli("compare --patterns uniform --variants lru,cace "
                    "--seeds 1,2 --rate 5 --duration 10 --serial --out " +
                    out2.string());
  CHECK(r2.exit_code == 0);
  CHECK(slurp(out / "summary.csv") == slurp(out2 / "summary.csv"));
  CHECK(slurp(out / "comparison.csv") == slurp(out2 / "comparison.csv"));
}

TEST_CASE("config file supplies defaults and flags override it") {
  fs::path cfg = g_workdir / "grid.json";
  {
    std::ofstream f(cfg);
    f << "{\"patterns\":[\"uniform\"],\"variants\":[\"lru\",\"cace\"],"
         "\"seeds\":[1],\"rate\":5.0,\"duration\":10.0}";
  }
  fs::path out = g_workdir / "cfg_out";
  auto r = run_cli("compare --config " + cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 0);
  std::string summary = slurp(out / "summary.csv");
  CHECK(summary.find("uniform,lru") != std::string::npos);
  CHECK(summary.find("ide-heavy") == std::string::npos);

  // An explicit --patterns flag wins over the config file.
  fs::path out2 = g_workdir / "cfg_out2";
  auto r2 = run_cli("compare --config " + cfg.string() +
                    " --patterns ide-heavy --out " + out2.string());
  CHECK(r2.exit_code == 0);
  CHECK(slurp(out2 / "summary.csv").find("ide-heavy,lru") != std::string::npos);
}

TEST_CASE("ablate defaults to the cace baseline on popularity-skewed") {
  fs::path out = g_workdir / "abl_out";
  auto r = run_cli("ablate --seeds 1 --rate 4 --duration 10 --out " +
                   out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("popularity-skewed,cace,") != std::string::npos);
  CHECK(r.output.find("cace-p4") != std::string::npos);
}

TEST_CASE("catalog round-trips through the --catalog flag") {
  fs::path cat = g_workdir / "catalog.json";
  CHECK(run_cli("catalog --output " + cat.string()).exit_code == 0);
  auto r = run_cli("--catalog " + cat.string() + " catalog");
  CHECK(r.exit_code == 0);
  CHECK(r.output == slurp(cat));
  CHECK(r.output.find("\"catalog_version\": 1") != std::string::npos);
}

int main(int argc, char** argv) {
  doctest::Context context;
  context.applyCommandLine(argc, argv);
  // Last non-flag argument is the path to the cacesim binary under test.
  for (int i = 1; i < argc; ++i) {
    if (argv[i][0] != '-') g_binary = argv[i];
  }
  if (g_binary.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cacesim>\n");
    return 1;
  }
  g_workdir = fs::temp_directory_path() / "cacesim_cli_test";
  fs::create_directories(g_workdir);
  return context.run();
}

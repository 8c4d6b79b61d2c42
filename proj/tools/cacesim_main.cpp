#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cacesim/experiment.hpp"

namespace fs = std::filesystem;
using namespace cacesim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw SimError("empty seed list");
  return seeds;
}

ModelCatalog load_or_default_catalog(const std::string& path) {
  if (path.empty()) return ModelCatalog::build_default();
  return ModelCatalog::load_file(path);
}

void print_run_summary(std::ostream& out, const SimulationReport& report) {
  RunMetrics m = compute_run_metrics(report);
  out << "pattern=" << to_string(report.meta.pattern)
      << " variant=" << to_string(report.meta.variant)
      << " seed=" << report.meta.seed << " requests=" << report.outcomes.size()
      << " hit_rate=" << m.cache_hit_rate
      << " load_overhead_s=" << m.load_overhead_s
      << " evictions=" << report.counters.evictions
      << " ttft_mean_s=" << m.ttft_completion.mean_s
      << " e2e_mean_s=" << m.e2e_reasoning.mean_s << "\n";
}

struct GridFlags {
  std::string patterns_csv = "uniform,ide-heavy,popularity-skewed";
  std::string variants_csv = "lru,cace-p4,cace";
  std::string seeds_csv = "1,2,3,4,5";
  double rate = 10.0;
  double duration = 30.0;
  int windows = 1;
  int accelerators = 4;
  double unload_time = 0.0;
  double w1 = 1.0;
  int window_length = 10;
  std::string p1_mode = "prose";
  std::string baseline = "lru";
  std::string out_dir = "out";
  std::string format = "csv";
  std::string config_path;
  bool serial = false;
};

void add_policy_flags(CLI::App* cmd, GridFlags& f) {
  cmd->add_option("--w1", f.w1, "Output-token weighting factor");
  cmd->add_option("--window", f.window_length, "Lookahead window length");
  cmd->add_option("--p1-mode", f.p1_mode, "Recency term mode: prose|verbatim")
      ->check(CLI::IsMember({"prose", "verbatim"}));
}

void add_grid_flags(CLI::App* cmd, GridFlags& f) {
  cmd->add_option("--patterns", f.patterns_csv, "Comma-separated patterns");
  cmd->add_option("--variants", f.variants_csv, "Comma-separated variants");
  cmd->add_option("--seeds", f.seeds_csv, "Comma-separated seeds");
  cmd->add_option("--rate", f.rate, "Poisson arrival rate (req/s)");
  cmd->add_option("--duration", f.duration, "Window duration in seconds");
  cmd->add_option("--windows", f.windows, "Number of concatenated windows");
  cmd->add_option("--accelerators", f.accelerators, "Accelerator count");
  cmd->add_option("--unload-time", f.unload_time, "Unload time in seconds");
  add_policy_flags(cmd, f);
  cmd->add_option("--baseline", f.baseline, "Baseline variant for deltas");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--config", f.config_path,
                  "JSON config file; explicit flags override it");
  cmd->add_flag("--serial", f.serial, "Run grid cells serially");
}

// Config file mirrors the flags; a flag given on the command line wins.
void apply_config_file(const CLI::App* cmd, GridFlags& f) {
  if (f.config_path.empty()) return;
  std::ifstream in(f.config_path);
  if (!in) throw SimError("cannot open config file: " + f.config_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SimError(std::string("invalid config JSON: ") + e.what());
  }
  auto overridden = [&](const char* flag) { return cmd->count(flag) > 0; };
  auto get_str = [&](const char* key, const char* flag, std::string& dst) {
    if (doc.contains(key) && !overridden(flag)) dst = doc[key].get<std::string>();
  };
  if (doc.contains("patterns") && !overridden("--patterns")) {
    std::string joined;
    for (const auto& p : doc["patterns"]) {
      if (!joined.empty()) joined += ',';
      joined += p.get<std::string>();
    }
    f.patterns_csv = joined;
  }
  if (doc.contains("variants") && !overridden("--variants")) {
    std::string joined;
    for (const auto& v : doc["variants"]) {
      if (!joined.empty()) joined += ',';
      joined += v.get<std::string>();
    }
    f.variants_csv = joined;
  }
  if (doc.contains("seeds") && !overridden("--seeds")) {
    std::string joined;
    for (const auto& s : doc["seeds"]) {
      if (!joined.empty()) joined += ',';
      joined += std::to_string(s.get<std::uint64_t>());
    }
    f.seeds_csv = joined;
  }
  auto get_num = [&](const char* key, const char* flag, auto& dst) {
    if (doc.contains(key) && !overridden(flag)) {
      dst = doc[key].get<std::decay_t<decltype(dst)>>();
    }
  };
  get_num("rate", "--rate", f.rate);
  get_num("duration", "--duration", f.duration);
  get_num("windows", "--windows", f.windows);
  get_num("accelerators", "--accelerators", f.accelerators);
  get_num("unload_time_s", "--unload-time", f.unload_time);
  get_num("w1", "--w1", f.w1);
  get_num("window_length", "--window", f.window_length);
  get_str("p1_mode", "--p1-mode", f.p1_mode);
  get_str("baseline", "--baseline", f.baseline);
  get_str("out_dir", "--out", f.out_dir);
  get_str("format", "--format", f.format);
}

ExperimentConfig to_experiment_config(const GridFlags& f) {
  ExperimentConfig cfg;
  cfg.patterns.clear();
  {
    std::stringstream ss(f.patterns_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.patterns.push_back(pattern_from_string(item));
    }
  }
  cfg.variants.clear();
  {
    std::stringstream ss(f.variants_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.variants.push_back(variant_from_string(item));
    }
  }
  cfg.seeds = parse_seed_list(f.seeds_csv);
  cfg.rate = f.rate;
  cfg.duration = f.duration;
  cfg.windows = f.windows;
  cfg.cluster.num_accelerators = f.accelerators;
  cfg.cluster.unload_time_s = f.unload_time;
  cfg.w1 = f.w1;
  cfg.window_length = f.window_length;
  cfg.p1_mode = p1_mode_from_string(f.p1_mode);
  cfg.out_dir = f.out_dir;
  return cfg;
}

int run_grid_command(const GridFlags& f, const std::string& catalog_path,
                     const std::string& baseline) {
  ModelCatalog catalog = load_or_default_catalog(catalog_path);
  ExperimentConfig cfg = to_experiment_config(f);
  try {
    cfg.validate();
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  GridResult grid = run_grid(cfg, catalog, !f.serial);

  fs::create_directories(cfg.out_dir);
  fs::create_directories(fs::path(cfg.out_dir) / "reports");
  for (const auto& cell : grid.cells) {
    for (const auto& report : cell.reports) {
      std::string name = std::string(to_string(cell.pattern)) + "_" +
                         std::string(to_string(cell.variant)) + "_seed" +
                         std::to_string(report.meta.seed) + ".json";
      save_report(report, (fs::path(cfg.out_dir) / "reports" / name).string());
    }
  }

  auto rows = grid.rows();
  ComparisonTable table = compare(rows, baseline);
  {
    std::ofstream out(fs::path(cfg.out_dir) / "summary.csv");
    out << emit_metrics_csv(rows);
  }
  const std::string comparison =
      emit(table, f.format == "json" ? EmitFormat::Json : EmitFormat::Csv);
  const std::string ext = (f.format == "json") ? ".json" : ".csv";
  {
    std::ofstream out(fs::path(cfg.out_dir) / ("comparison" + ext));
    out << comparison;
  }
  std::cout << comparison;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator for multi-model CodeLLM serving with "
               "context-aware eviction"};
  app.require_subcommand(1);

  std::string catalog_path;
  app.add_option("--catalog", catalog_path, "Catalog JSON file (default: built-in)");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a request trace");
  std::string gen_pattern = "uniform";
  double gen_rate = 10.0, gen_duration = 30.0;
  std::uint64_t gen_seed = 1;
  int gen_windows = 1;
  std::string gen_output = "trace.jsonl";
  gen->add_option("--pattern", gen_pattern, "uniform|ide-heavy|popularity-skewed");
  gen->add_option("--rate", gen_rate, "Poisson arrival rate (req/s)");
  gen->add_option("--duration", gen_duration, "Window duration in seconds");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--windows", gen_windows, "Number of concatenated windows");
  gen->add_option("--output,-o", gen_output, "Trace output path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Replay a trace under one policy");
  std::string sim_trace, sim_policy = "cace", sim_output = "report.json";
  std::string sim_p1_mode = "prose";
  double sim_w1 = 1.0, sim_unload = 0.0;
  int sim_window = 10, sim_accel = 4;
  sim->add_option("--trace", sim_trace, "Trace JSONL file")->required();
  sim->add_option("--policy", sim_policy,
                  "lru|cace|cace-p1|cace-p2|cace-p3|cace-p4");
  sim->add_option("--w1", sim_w1, "Output-token weighting factor");
  sim->add_option("--window", sim_window, "Lookahead window length");
  sim->add_option("--p1-mode", sim_p1_mode, "prose|verbatim")
      ->check(CLI::IsMember({"prose", "verbatim"}));
  sim->add_option("--accelerators", sim_accel, "Accelerator count");
  sim->add_option("--unload-time", sim_unload, "Unload time in seconds");
  sim->add_option("--output,-o", sim_output, "Report output path");

  // compare
  auto* cmp = app.add_subcommand(
      "compare", "Run a (patterns x variants x seeds) grid and compare");
  GridFlags cmp_flags;
  add_grid_flags(cmp, cmp_flags);

  // ablate
  auto* abl = app.add_subcommand(
      "ablate", "Factor ablation grid on one pattern, baseline cace");
  GridFlags abl_flags;
  abl_flags.patterns_csv = "popularity-skewed";
  abl_flags.variants_csv = "cace,cace-p1,cace-p2,cace-p3,cace-p4";
  abl_flags.baseline = "cace";
  std::string abl_pattern;
  abl->add_option("--pattern", abl_pattern, "Pattern to ablate on");
  add_grid_flags(abl, abl_flags);

  // catalog
  auto* cat = app.add_subcommand("catalog", "Print the model catalog");
  std::string cat_output;
  cat->add_option("--output,-o", cat_output, "Write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (gen_rate <= 0 || gen_duration < 0 || gen_windows < 1) {
        std::cerr << "error: rate must be > 0, duration >= 0, windows >= 1\n"
                  << gen->help();
        return kExitUsage;
      }
      ModelCatalog catalog = load_or_default_catalog(catalog_path);
      Trace trace = build_trace(pattern_from_string(gen_pattern), gen_rate,
                                gen_duration, gen_seed, catalog, {}, gen_windows);
      save_trace(trace, gen_output);
      std::map<std::string, std::size_t> census;
      for (const auto& r : trace.requests) {
        census[std::string(to_string(r.language)) + "/" +
               std::string(to_string(r.task_class))]++;
      }
      std::cout << "wrote " << gen_output << " with " << trace.requests.size()
                << " requests\n";
      for (const auto& [label, count] : census) {
        std::cout << "  " << label << ": " << count << "\n";
      }
      return kExitOk;
    }

    if (sim->parsed()) {
      ModelCatalog catalog = load_or_default_catalog(catalog_path);
      Trace trace = load_trace(sim_trace);
      PolicyConfig pc;
      pc.variant = variant_from_string(sim_policy);
      pc.w1 = sim_w1;
      pc.window_length = sim_window;
      pc.output_token_normalizer = catalog.max_expected_output_tokens();
      pc.p1_mode = p1_mode_from_string(sim_p1_mode);
      ClusterConfig cluster;
      cluster.num_accelerators = sim_accel;
      cluster.unload_time_s = sim_unload;
      SimulationReport report = run(trace, catalog, cluster, make_policy(pc));
      save_report(report, sim_output);
      print_run_summary(std::cout, report);
      return kExitOk;
    }

    if (cmp->parsed()) {
      apply_config_file(cmp, cmp_flags);
      return run_grid_command(cmp_flags, catalog_path, cmp_flags.baseline);
    }

    if (abl->parsed()) {
      apply_config_file(abl, abl_flags);
      if (!abl_pattern.empty()) abl_flags.patterns_csv = abl_pattern;
      return run_grid_command(abl_flags, catalog_path, abl_flags.baseline);
    }

    if (cat->parsed()) {
      ModelCatalog catalog = load_or_default_catalog(catalog_path);
      if (cat_output.empty()) {
        std::cout << catalog.save();
      } else {
        catalog.save_file(cat_output);
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

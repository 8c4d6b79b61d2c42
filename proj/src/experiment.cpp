#include "cacesim/experiment.hpp"

#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cacesim {

void ExperimentConfig::validate() const {
  if (patterns.empty()) throw SimError("experiment: no patterns");
  if (variants.empty()) throw SimError("experiment: no variants");
  if (seeds.empty()) throw SimError("experiment: no seeds");
  if (rate <= 0) throw SimError("experiment: rate must be positive");
  if (duration <= 0) throw SimError("experiment: duration must be positive");
  if (windows < 1) throw SimError("experiment: windows must be >= 1");
  if (window_length < 1) throw SimError("experiment: window must be >= 1");
  if (w1 < 0) throw SimError("experiment: w1 must be non-negative");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream ss;
  ss.precision(17);
  for (auto p : patterns) ss << to_string(p) << ',';
  ss << '|';
  for (auto v : variants) ss << to_string(v) << ',';
  ss << '|';
  for (auto s : seeds) ss << s << ',';
  ss << '|' << rate << '|' << duration << '|' << windows << '|'
     << cluster.num_accelerators << '|' << cluster.models_per_accelerator
     << '|' << cluster.unload_time_s << '|' << w1 << '|' << window_length
     << '|' << to_string(p1_mode);
  return ss.str();
}

PolicyConfig make_policy_config(const ExperimentConfig& cfg, Variant variant,
                                const ModelCatalog& catalog) {
  PolicyConfig pc;
  pc.variant = variant;
  pc.w1 = cfg.w1;
  pc.window_length = cfg.window_length;
  pc.output_token_normalizer = catalog.max_expected_output_tokens();
  pc.p1_mode = cfg.p1_mode;
  return pc;
}

const GridCell& GridResult::cell(PatternName pattern, Variant variant) const {
  for (const auto& c : cells) {
    if (c.pattern == pattern && c.variant == variant) return c;
  }
  throw SimError("grid: no such cell");
}

std::vector<std::tuple<std::string, std::string, RunMetrics>>
GridResult::rows() const {
  std::vector<std::tuple<std::string, std::string, RunMetrics>> out;
  for (const auto& c : cells) {
    out.emplace_back(std::string(to_string(c.pattern)),
                     std::string(to_string(c.variant)), c.averaged);
  }
  return out;
}

namespace {

GridCell run_cell(const ExperimentConfig& cfg, const ModelCatalog& catalog,
                  PatternName pattern, Variant variant) {
  GridCell cell;
  cell.pattern = pattern;
  cell.variant = variant;
  Policy policy = make_policy(make_policy_config(cfg, variant, catalog));
  std::vector<RunMetrics> per_seed;
  for (std::uint64_t seed : cfg.seeds) {
    Trace trace = build_trace(pattern, cfg.rate, cfg.duration, seed, catalog,
                              cfg.tokens, cfg.windows);
    SimulationReport report = run(trace, catalog, cfg.cluster, policy);
    per_seed.push_back(compute_run_metrics(report));
    cell.reports.push_back(std::move(report));
  }
  cell.averaged = average_metrics(per_seed);
  return cell;
}

}  // namespace

GridResult run_grid(const ExperimentConfig& cfg, const ModelCatalog& catalog,
                    bool parallel) {
  cfg.validate();
  struct CellKey {
    PatternName pattern;
    Variant variant;
  };
  std::vector<CellKey> keys;
  for (PatternName p : cfg.patterns) {
    for (Variant v : cfg.variants) keys.push_back({p, v});
  }

  GridResult result;
  result.cells.resize(keys.size());
  const int n = static_cast<int>(keys.size());
  if (parallel) {
    // Exceptions must not escape the parallel region; remember the first one.
    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        result.cells[i] =
            run_cell(cfg, catalog, keys[i].pattern, keys[i].variant);
      } catch (const std::exception& e) {
#pragma omp critical
        if (error.empty()) error = e.what();
      }
    }
    if (!error.empty()) throw SimError(error);
  } else {
    for (int i = 0; i < n; ++i) {
      result.cells[i] = run_cell(cfg, catalog, keys[i].pattern, keys[i].variant);
    }
  }
  return result;
}

GridResult run_grid_serial(const ExperimentConfig& cfg,
                           const ModelCatalog& catalog) {
  return run_grid(cfg, catalog, false);
}

}  // namespace cacesim

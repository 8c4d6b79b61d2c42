#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "cacesim/catalog.hpp"
#include "cacesim/engine.hpp"
#include "cacesim/metrics.hpp"
#include "cacesim/policy.hpp"
#include "cacesim/workload.hpp"

namespace cacesim {

struct ExperimentConfig {
  std::vector<PatternName> patterns = {PatternName::Uniform,
                                       PatternName::IdeHeavy,
                                       PatternName::PopularitySkewed};
  std::vector<Variant> variants = {Variant::Lru, Variant::CaceFull};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double rate = 10.0;
  double duration = 30.0;
  int windows = 1;
  ClusterConfig cluster;
  double w1 = 1.0;
  int window_length = 10;
  P1Mode p1_mode = P1Mode::ProseConsistent;
  TokenParams tokens;
  std::string out_dir;

  void validate() const;
  std::string canonical() const;
  std::uint64_t hash() const { return fnv1a(canonical()); }
};

struct GridCell {
  PatternName pattern;
  Variant variant;
  RunMetrics averaged;
  std::vector<SimulationReport> reports;  // one per seed
};

struct GridResult {
  std::vector<GridCell> cells;  // pattern-major, then variant, fixed order

  const GridCell& cell(PatternName pattern, Variant variant) const;
  std::vector<std::tuple<std::string, std::string, RunMetrics>> rows() const;
};

// Runs every (pattern, variant, seed) simulation. Cells are independent, so
// the parallel path fans them out with OpenMP; the serial path is the
// reference used by tests. Results are identical either way.
GridResult run_grid(const ExperimentConfig& cfg, const ModelCatalog& catalog,
                    bool parallel = true);
GridResult run_grid_serial(const ExperimentConfig& cfg,
                           const ModelCatalog& catalog);

PolicyConfig make_policy_config(const ExperimentConfig& cfg, Variant variant,
                                const ModelCatalog& catalog);

}  // namespace cacesim

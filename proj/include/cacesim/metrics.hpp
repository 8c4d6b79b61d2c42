#pragma once

#include <map>
#include <string>
#include <vector>

#include "cacesim/engine.hpp"

namespace cacesim {

struct LatencySummary {
  std::size_t count = 0;
  double mean_s = 0.0;
  double p50_s = 0.0;
  double p95_s = 0.0;
  double p99_s = 0.0;
  double max_s = 0.0;
};

// Nearest-rank percentiles: the ceil(q*n)-th order statistic.
LatencySummary summarize(const std::vector<double>& samples);

struct RunMetrics {
  double cache_hit_rate = 0.0;
  double load_overhead_s = 0.0;
  double evictions = 0.0;  // real-valued so seed averages are representable
  LatencySummary ttft_completion;
  LatencySummary e2e_reasoning;
};

RunMetrics compute_run_metrics(const SimulationReport& report);

// Elementwise mean over per-seed metrics of one grid cell.
RunMetrics average_metrics(const std::vector<RunMetrics>& runs);

struct ComparisonRow {
  std::string pattern;
  std::string variant;
  RunMetrics metrics;
  bool is_baseline = false;
  // Relative reductions vs the baseline row of the same pattern:
  // (baseline - candidate) / baseline, so positive means improvement for
  // cost metrics. Hit rate is an absolute difference (candidate - baseline).
  double hit_rate_delta = 0.0;
  double load_overhead_reduction = 0.0;
  double evictions_reduction = 0.0;
  double ttft_mean_reduction = 0.0;
  double ttft_p95_reduction = 0.0;
  double ttft_p99_reduction = 0.0;
  double e2e_mean_reduction = 0.0;
  double e2e_p99_reduction = 0.0;
};

struct ComparisonTable {
  std::string baseline_variant;
  std::vector<ComparisonRow> rows;
};

ComparisonTable compare(
    const std::vector<std::tuple<std::string, std::string, RunMetrics>>& runs,
    const std::string& baseline_variant);

enum class EmitFormat : int { Json, Csv };

std::string emit(const ComparisonTable& table, EmitFormat format);
std::string emit_metrics_csv(
    const std::vector<std::tuple<std::string, std::string, RunMetrics>>& rows);

}  // namespace cacesim

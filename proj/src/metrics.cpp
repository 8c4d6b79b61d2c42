#include "cacesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace cacesim {

using ordered_json = nlohmann::ordered_json;

LatencySummary summarize(const std::vector<double>& samples) {
  if (samples.empty()) throw SimError("summarize: empty sample");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  auto rank = [&](double q) {
    std::size_t r = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    r = std::clamp<std::size_t>(r, 1, sorted.size());
    return sorted[r - 1];
  };
  LatencySummary s;
  s.count = sorted.size();
  s.mean_s = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
             static_cast<double>(sorted.size());
  s.p50_s = rank(0.50);
  s.p95_s = rank(0.95);
  s.p99_s = rank(0.99);
  s.max_s = sorted.back();
  return s;
}

RunMetrics compute_run_metrics(const SimulationReport& report) {
  const auto& c = report.counters;
  if (c.hits + c.misses == 0) {
    throw SimError("compute_run_metrics: empty report");
  }
  RunMetrics m;
  m.cache_hit_rate =
      static_cast<double>(c.hits) / static_cast<double>(c.hits + c.misses);
  m.load_overhead_s = c.load_overhead_s;
  m.evictions = static_cast<double>(c.evictions);
  std::vector<double> ttft, e2e;
  for (const auto& o : report.outcomes) {
    if (o.task_class == TaskClass::Completion) {
      ttft.push_back(o.ttft_s);
    } else {
      e2e.push_back(o.e2e_s);
    }
  }
  if (ttft.empty()) {
    throw SimError("compute_run_metrics: no completion outcomes for TTFT");
  }
  if (e2e.empty()) {
    throw SimError("compute_run_metrics: no reasoning outcomes for E2E");
  }
  m.ttft_completion = summarize(ttft);
  m.e2e_reasoning = summarize(e2e);
  return m;
}

namespace {

LatencySummary average_summary(const std::vector<RunMetrics>& runs,
                               LatencySummary RunMetrics::*member) {
  LatencySummary avg;
  for (const auto& r : runs) {
    const LatencySummary& s = r.*member;
    avg.count += s.count;
    avg.mean_s += s.mean_s;
    avg.p50_s += s.p50_s;
    avg.p95_s += s.p95_s;
    avg.p99_s += s.p99_s;
    avg.max_s += s.max_s;
  }
  const double k = static_cast<double>(runs.size());
  avg.mean_s /= k;
  avg.p50_s /= k;
  avg.p95_s /= k;
  avg.p99_s /= k;
  avg.max_s /= k;
  return avg;
}

}  // namespace

RunMetrics average_metrics(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw SimError("average_metrics: no runs");
  RunMetrics avg;
  for (const auto& r : runs) {
    avg.cache_hit_rate += r.cache_hit_rate;
    avg.load_overhead_s += r.load_overhead_s;
    avg.evictions += r.evictions;
  }
  const double k = static_cast<double>(runs.size());
  avg.cache_hit_rate /= k;
  avg.load_overhead_s /= k;
  avg.evictions /= k;
  avg.ttft_completion = average_summary(runs, &RunMetrics::ttft_completion);
  avg.e2e_reasoning = average_summary(runs, &RunMetrics::e2e_reasoning);
  return avg;
}

namespace {

double reduction(double baseline, double candidate) {
  if (baseline == 0.0) return 0.0;
  return (baseline - candidate) / baseline;
}

}  // namespace

ComparisonTable compare(
    const std::vector<std::tuple<std::string, std::string, RunMetrics>>& runs,
    const std::string& baseline_variant) {
  std::map<std::string, const RunMetrics*> baselines;
  for (const auto& [pattern, variant, metrics] : runs) {
    if (variant == baseline_variant) baselines[pattern] = &metrics;
  }
  if (baselines.empty()) {
    throw SimError("compare: baseline variant not present: " +
                   baseline_variant);
  }
  ComparisonTable table;
  table.baseline_variant = baseline_variant;
  for (const auto& [pattern, variant, metrics] : runs) {
    auto bit = baselines.find(pattern);
    if (bit == baselines.end()) {
      throw SimError("compare: no baseline row for pattern " + pattern);
    }
    const RunMetrics& base = *bit->second;
    ComparisonRow row;
    row.pattern = pattern;
    row.variant = variant;
    row.metrics = metrics;
    row.is_baseline = (variant == baseline_variant);
    row.hit_rate_delta = metrics.cache_hit_rate - base.cache_hit_rate;
    row.load_overhead_reduction =
        reduction(base.load_overhead_s, metrics.load_overhead_s);
    row.evictions_reduction = reduction(base.evictions, metrics.evictions);
    row.ttft_mean_reduction =
        reduction(base.ttft_completion.mean_s, metrics.ttft_completion.mean_s);
    row.ttft_p95_reduction =
        reduction(base.ttft_completion.p95_s, metrics.ttft_completion.p95_s);
    row.ttft_p99_reduction =
        reduction(base.ttft_completion.p99_s, metrics.ttft_completion.p99_s);
    row.e2e_mean_reduction =
        reduction(base.e2e_reasoning.mean_s, metrics.e2e_reasoning.mean_s);
    row.e2e_p99_reduction =
        reduction(base.e2e_reasoning.p99_s, metrics.e2e_reasoning.p99_s);
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

ordered_json metrics_json(const RunMetrics& m) {
  return {{"cache_hit_rate", m.cache_hit_rate},
          {"load_overhead_s", m.load_overhead_s},
          {"evictions", m.evictions},
          {"ttft_mean_s", m.ttft_completion.mean_s},
          {"ttft_p50_s", m.ttft_completion.p50_s},
          {"ttft_p95_s", m.ttft_completion.p95_s},
          {"ttft_p99_s", m.ttft_completion.p99_s},
          {"e2e_mean_s", m.e2e_reasoning.mean_s},
          {"e2e_p50_s", m.e2e_reasoning.p50_s},
          {"e2e_p95_s", m.e2e_reasoning.p95_s},
          {"e2e_p99_s", m.e2e_reasoning.p99_s}};
}

void append_csv_metrics(std::ostringstream& out, const std::string& pattern,
                        const std::string& variant, const RunMetrics& m) {
  out << pattern << ',' << variant << ',' << m.cache_hit_rate << ','
      << m.load_overhead_s << ',' << m.evictions << ','
      << m.ttft_completion.mean_s << ',' << m.ttft_completion.p95_s << ','
      << m.ttft_completion.p99_s << ',' << m.e2e_reasoning.mean_s << ','
      << m.e2e_reasoning.p95_s << ',' << m.e2e_reasoning.p99_s;
}

constexpr const char* kCsvHeader =
    "pattern,variant,cache_hit_rate,load_overhead_s,evictions,"
    "ttft_mean_s,ttft_p95_s,ttft_p99_s,e2e_mean_s,e2e_p95_s,e2e_p99_s";

}  // namespace

std::string emit(const ComparisonTable& table, EmitFormat format) {
  if (format == EmitFormat::Json) {
    ordered_json doc;
    doc["baseline_variant"] = table.baseline_variant;
    // Reductions are (baseline - candidate) / baseline: positive means the
    // candidate is cheaper. hit_rate_delta is absolute (candidate - baseline).
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows) {
      ordered_json row;
      row["pattern"] = r.pattern;
      row["variant"] = r.variant;
      row["is_baseline"] = r.is_baseline;
      row["metrics"] = metrics_json(r.metrics);
      row["vs_baseline"] = {
          {"hit_rate_delta", r.hit_rate_delta},
          {"load_overhead_reduction", r.load_overhead_reduction},
          {"evictions_reduction", r.evictions_reduction},
          {"ttft_mean_reduction", r.ttft_mean_reduction},
          {"ttft_p95_reduction", r.ttft_p95_reduction},
          {"ttft_p99_reduction", r.ttft_p99_reduction},
          {"e2e_mean_reduction", r.e2e_mean_reduction},
          {"e2e_p99_reduction", r.e2e_p99_reduction}};
      rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out.precision(10);
  out << kCsvHeader
      << ",hit_rate_delta,load_overhead_reduction,evictions_reduction,"
         "ttft_mean_reduction,ttft_p95_reduction,ttft_p99_reduction,"
         "e2e_mean_reduction,e2e_p99_reduction\n";
  for (const auto& r : table.rows) {
    append_csv_metrics(out, r.pattern, r.variant, r.metrics);
    out << ',' << r.hit_rate_delta << ',' << r.load_overhead_reduction << ','
        << r.evictions_reduction << ',' << r.ttft_mean_reduction << ','
        << r.ttft_p95_reduction << ',' << r.ttft_p99_reduction << ','
        << r.e2e_mean_reduction << ',' << r.e2e_p99_reduction << '\n';
  }
  return out.str();
}

std::string emit_metrics_csv(
    const std::vector<std::tuple<std::string, std::string, RunMetrics>>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << kCsvHeader << '\n';
  for (const auto& [pattern, variant, metrics] : rows) {
    append_csv_metrics(out, pattern, variant, metrics);
    out << '\n';
  }
  return out.str();
}

}  // namespace cacesim

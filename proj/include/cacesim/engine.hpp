#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cacesim/catalog.hpp"
#include "cacesim/policy.hpp"
#include "cacesim/workload.hpp"

namespace cacesim {

struct ClusterConfig {
  int num_accelerators = 4;
  int models_per_accelerator = 1;
  double unload_time_s = 0.0;
};

struct RequestOutcome {
  std::uint64_t request_id = 0;
  std::string model_id;
  TaskClass task_class = TaskClass::Completion;
  bool cold_start = false;
  double queue_wait_s = 0.0;
  double load_wait_s = 0.0;
  double prefill_s = 0.0;
  double decode_s = 0.0;
  double ttft_s = 0.0;
  double e2e_s = 0.0;
};

struct SimCounters {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  double load_overhead_s = 0.0;
};

struct RunMeta {
  Variant variant = Variant::Lru;
  std::uint64_t seed = 0;
  PatternName pattern = PatternName::Uniform;
  std::uint64_t config_hash = 0;
};

struct SimulationReport {
  RunMeta meta;
  SimCounters counters;
  std::vector<RequestOutcome> outcomes;
  int max_resident = 0;
  std::uint64_t loads = 0;
};

std::pair<double, double> service_times(const Request& request,
                                        const ModelDescriptor& descriptor);

LookaheadWindow snapshot_window(const std::vector<std::string>& pending_model_ids,
                                int window_length);

SimulationReport run(const Trace& trace, const ModelCatalog& catalog,
                     const ClusterConfig& cluster, const Policy& policy);

std::string serialize_report(const SimulationReport& report);
void save_report(const SimulationReport& report, const std::string& path);

}  // namespace cacesim

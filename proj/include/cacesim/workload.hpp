#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cacesim/catalog.hpp"
#include "cacesim/types.hpp"

namespace cacesim {

struct Request {
  std::uint64_t request_id = 0;
  double arrival_time_s = 0.0;
  Language language = Language::Java;
  TaskClass task_class = TaskClass::Completion;
  int prompt_tokens = 1;
  int output_tokens = 1;

  bool operator==(const Request&) const = default;
};

struct WorkloadPattern {
  PatternName name = PatternName::Uniform;
  std::map<TaskClass, double> task_mix;
  std::map<Language, double> language_mix;

  static WorkloadPattern get(PatternName name);
};

struct TokenParams {
  int completion_prompt_tokens = 256;
  int completion_output_tokens = 50;
  int reasoning_prompt_tokens = 512;
  int reasoning_output_tokens = 600;
  int completion_output_cap = 50;
  // Optional seeded lognormal sampling of output lengths for sensitivity
  // studies; defaults to fixed per-class lengths.
  bool sample_output_tokens = false;
  double output_sigma = 0.3;
};

struct Trace {
  PatternName pattern = PatternName::Uniform;
  std::uint64_t seed = 0;
  double window_duration_s = 30.0;
  double arrival_rate_per_s = 1.0;
  int windows = 1;
  std::vector<Request> requests;

  bool operator==(const Trace&) const = default;
};

// Poisson process: strictly increasing arrival times in [0, duration].
std::vector<double> generate_arrivals(double rate, double duration,
                                      std::uint64_t seed);

// Quota-exact labels (largest remainder, task split first, then languages
// within each task), returned in a seeded shuffle order.
std::vector<std::pair<Language, TaskClass>> assign_labels(
    std::size_t n, const WorkloadPattern& pattern, std::uint64_t seed);

Trace build_trace(PatternName pattern, double rate, double duration,
                  std::uint64_t seed, const ModelCatalog& catalog,
                  const TokenParams& tokens = {}, int windows = 1);

std::string serialize_trace(const Trace& trace);
Trace parse_trace(const std::string& text);
void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

}  // namespace cacesim

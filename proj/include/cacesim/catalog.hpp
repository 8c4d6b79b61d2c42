#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cacesim/types.hpp"

namespace cacesim {

// One registered CodeLLM with its profiled load characteristics.
struct ModelDescriptor {
  std::string model_id;
  Language language = Language::Java;
  TaskClass task_class = TaskClass::Completion;
  std::int64_t param_count = 0;
  std::int64_t weight_bytes = 0;
  double load_time_s = 0.0;
  double prefill_rate_tps = 1.0;
  double decode_rate_tps = 1.0;
  int expected_output_tokens = 1;

  bool operator==(const ModelDescriptor&) const = default;
};

// Synthetic profiler knobs: load time is derived from weight size instead of
// measured on hardware.
struct ProfileParams {
  double staging_bandwidth_Bps = 2e9;
  double load_fixed_overhead_s = 1.0;

  bool operator==(const ProfileParams&) const = default;
};

// Fills in load_time_s = weight_bytes / bandwidth + fixed overhead.
ModelDescriptor profile_model(ModelDescriptor descriptor,
                              const ProfileParams& params);

class ModelCatalog {
public:
  ModelCatalog() = default;
  ModelCatalog(std::vector<ModelDescriptor> models, ProfileParams params);

  static ModelCatalog build_default(const ProfileParams& params = {});

  const std::vector<ModelDescriptor>& models() const { return models_; }
  const ProfileParams& profile_params() const { return params_; }

  const ModelDescriptor& lookup(Language language, TaskClass task_class) const;
  bool contains(Language language, TaskClass task_class) const;
  const ModelDescriptor& by_id(const std::string& model_id) const;
  int max_expected_output_tokens() const;

  std::string save() const;
  static ModelCatalog load(const std::string& text);
  void save_file(const std::string& path) const;
  static ModelCatalog load_file(const std::string& path);

  bool operator==(const ModelCatalog& other) const {
    return models_ == other.models_ && params_ == other.params_;
  }

private:
  void build_index();

  std::vector<ModelDescriptor> models_;
  ProfileParams params_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::pair<int, int>, std::size_t> by_key_;
};

// Default generation-speed profile for the synthetic catalog, split by model
// size class.
struct RateDefaults {
  double small_prefill_tps = 8192.0;
  double small_decode_tps = 256.0;
  double large_prefill_tps = 2048.0;
  double large_decode_tps = 600.0;
};

}  // namespace cacesim

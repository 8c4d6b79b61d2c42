#include "cacesim/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cacesim {

using ordered_json = nlohmann::ordered_json;

ModelDescriptor profile_model(ModelDescriptor descriptor,
                              const ProfileParams& params) {
  if (descriptor.weight_bytes <= 0) {
    throw SimError("profile_model: weight_bytes must be positive for " +
                   descriptor.model_id);
  }
  if (params.staging_bandwidth_Bps <= 0) {
    throw SimError("profile_model: staging bandwidth must be positive");
  }
  if (params.load_fixed_overhead_s < 0) {
    throw SimError("profile_model: fixed overhead must be non-negative");
  }
  descriptor.load_time_s =
      static_cast<double>(descriptor.weight_bytes) /
          params.staging_bandwidth_Bps +
      params.load_fixed_overhead_s;
  return descriptor;
}

ModelCatalog::ModelCatalog(std::vector<ModelDescriptor> models,
                           ProfileParams params)
    : models_(std::move(models)), params_(params) {
  build_index();
}

void ModelCatalog::build_index() {
  by_id_.clear();
  by_key_.clear();
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const auto& m = models_[i];
    if (m.load_time_s <= 0) {
      throw SimError("catalog: load_time_s must be positive for " + m.model_id);
    }
    if (!by_id_.emplace(m.model_id, i).second) {
      throw SimError("catalog: duplicate model_id " + m.model_id);
    }
    auto key = std::make_pair(static_cast<int>(m.language),
                              static_cast<int>(m.task_class));
    if (!by_key_.emplace(key, i).second) {
      throw SimError("catalog: duplicate (language, task_class) entry for " +
                     m.model_id);
    }
  }
  // Small-vs-large split: every completion model must be smaller than every
  // reasoning model.
  std::int64_t max_completion = 0;
  std::int64_t min_reasoning = INT64_MAX;
  bool any_completion = false, any_reasoning = false;
  for (const auto& m : models_) {
    if (m.task_class == TaskClass::Completion) {
      any_completion = true;
      max_completion = std::max(max_completion, m.param_count);
    } else {
      any_reasoning = true;
      min_reasoning = std::min(min_reasoning, m.param_count);
    }
  }
  if (any_completion && any_reasoning && max_completion >= min_reasoning) {
    throw SimError(
        "catalog: completion models must be smaller than reasoning models");
  }
}

ModelCatalog ModelCatalog::build_default(const ProfileParams& params) {
  const RateDefaults rates;
  std::vector<ModelDescriptor> models;
  models.reserve(16);
  for (Language lang : kAllLanguages) {
    for (TaskClass tc : kAllTaskClasses) {
      ModelDescriptor m;
      m.language = lang;
      m.task_class = tc;
      m.model_id =
          std::string(to_string(lang)) + "-" + std::string(to_string(tc));
      const bool small = (tc == TaskClass::Completion);
      m.param_count = small ? 500'000'000LL : 7'000'000'000LL;
      m.weight_bytes = m.param_count * 2;  // 16-bit weights
      m.prefill_rate_tps =
          small ? rates.small_prefill_tps : rates.large_prefill_tps;
      m.decode_rate_tps =
          small ? rates.small_decode_tps : rates.large_decode_tps;
      m.expected_output_tokens = small ? 50 : 600;
      models.push_back(profile_model(std::move(m), params));
    }
  }
  return ModelCatalog(std::move(models), params);
}

bool ModelCatalog::contains(Language language, TaskClass task_class) const {
  return by_key_.count(std::make_pair(static_cast<int>(language),
                                      static_cast<int>(task_class))) > 0;
}

const ModelDescriptor& ModelCatalog::lookup(Language language,
                                            TaskClass task_class) const {
  auto it = by_key_.find(std::make_pair(static_cast<int>(language),
                                        static_cast<int>(task_class)));
  if (it == by_key_.end()) {
    throw SimError("catalog: no model registered for (" +
                   std::string(to_string(language)) + ", " +
                   std::string(to_string(task_class)) + ")");
  }
  return models_[it->second];
}

const ModelDescriptor& ModelCatalog::by_id(const std::string& model_id) const {
  auto it = by_id_.find(model_id);
  if (it == by_id_.end()) {
    throw SimError("catalog: unknown model_id " + model_id);
  }
  return models_[it->second];
}

int ModelCatalog::max_expected_output_tokens() const {
  int best = 1;
  for (const auto& m : models_) {
    best = std::max(best, m.expected_output_tokens);
  }
  return best;
}

std::string ModelCatalog::save() const {
  ordered_json doc;
  doc["catalog_version"] = 1;
  doc["profile_params"] = {
      {"staging_bandwidth_Bps", params_.staging_bandwidth_Bps},
      {"load_fixed_overhead_s", params_.load_fixed_overhead_s}};
  ordered_json arr = ordered_json::array();
  for (const auto& m : models_) {
    arr.push_back({{"model_id", m.model_id},
                   {"language", to_string(m.language)},
                   {"task_class", to_string(m.task_class)},
                   {"param_count", m.param_count},
                   {"weight_bytes", m.weight_bytes},
                   {"load_time_s", m.load_time_s},
                   {"prefill_rate_tps", m.prefill_rate_tps},
                   {"decode_rate_tps", m.decode_rate_tps},
                   {"expected_output_tokens", m.expected_output_tokens}});
  }
  doc["models"] = std::move(arr);
  return doc.dump(2) + "\n";
}

ModelCatalog ModelCatalog::load(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("catalog: invalid JSON: ") + e.what());
  }
  try {
    if (doc.at("catalog_version").get<int>() != 1) {
      throw ParseError("catalog: unsupported catalog_version");
    }
    ProfileParams params;
    params.staging_bandwidth_Bps =
        doc.at("profile_params").at("staging_bandwidth_Bps").get<double>();
    params.load_fixed_overhead_s =
        doc.at("profile_params").at("load_fixed_overhead_s").get<double>();
    std::vector<ModelDescriptor> models;
    for (const auto& rec : doc.at("models")) {
      ModelDescriptor m;
      m.model_id = rec.at("model_id").get<std::string>();
      m.language = language_from_string(rec.at("language").get<std::string>());
      m.task_class =
          task_class_from_string(rec.at("task_class").get<std::string>());
      m.param_count = rec.at("param_count").get<std::int64_t>();
      m.weight_bytes = rec.at("weight_bytes").get<std::int64_t>();
      m.load_time_s = rec.at("load_time_s").get<double>();
      m.prefill_rate_tps = rec.at("prefill_rate_tps").get<double>();
      m.decode_rate_tps = rec.at("decode_rate_tps").get<double>();
      m.expected_output_tokens = rec.at("expected_output_tokens").get<int>();
      models.push_back(std::move(m));
    }
    return ModelCatalog(std::move(models), params);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("catalog: missing or mistyped field: ") +
                     e.what());
  }
}

void ModelCatalog::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("catalog: cannot open for writing: " + path);
  out << save();
}

ModelCatalog ModelCatalog::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("catalog: cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load(ss.str());
}

}  // namespace cacesim

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cacesim/catalog.hpp"
#include "cacesim/types.hpp"

namespace cacesim {

struct ResidencyEntry {
  std::string model_id;
  double last_used_s = 0.0;
  bool busy = false;
};

struct ResidencySet {
  std::vector<ResidencyEntry> entries;
  int capacity = 4;
};

// Deduplicated prefix of the pending queue's models, first-occurrence order.
struct LookaheadWindow {
  int length = 10;
  std::vector<std::string> model_ids;
};

enum class P1Mode : int {
  // 1 - 1/(1 + ln t): staler models score higher and are evicted first.
  ProseConsistent = 0,
  // 1/(1 + ln t): the score term taken literally.
  Verbatim,
};

std::string_view to_string(P1Mode m);
P1Mode p1_mode_from_string(std::string_view s);

struct PolicyConfig {
  Variant variant = Variant::CaceFull;
  double w1 = 1.0;
  int window_length = 10;
  int output_token_normalizer = 600;
  P1Mode p1_mode = P1Mode::ProseConsistent;
};

struct ScoreBreakdown {
  std::string model_id;
  double p1_recency = 0.0;
  double p2_reload = 0.0;
  double p3_future = 0.0;
  double p4_criticality = 0.0;
  double total = 0.0;
};

LookaheadWindow dedup_window(const std::vector<std::string>& pending_model_ids,
                             int length);

ScoreBreakdown eviction_score(const ResidencyEntry& entry,
                              const ModelDescriptor& descriptor,
                              const LookaheadWindow& window, double clock,
                              const PolicyConfig& cfg);

// Victim among idle residents: LRU picks the stalest; CACE variants pick the
// max-score entry (ties: smaller last_used_s, then model_id). Empty optional
// when every resident is busy.
std::optional<std::string> select_victim(const ResidencySet& residency,
                                         const LookaheadWindow& window,
                                         const ModelCatalog& catalog,
                                         double clock,
                                         const PolicyConfig& cfg);

class Policy {
public:
  explicit Policy(PolicyConfig cfg) : cfg_(cfg) {}

  const PolicyConfig& config() const { return cfg_; }

  std::optional<std::string> select_victim(const ResidencySet& residency,
                                           const LookaheadWindow& window,
                                           const ModelCatalog& catalog,
                                           double clock) const {
    return cacesim::select_victim(residency, window, catalog, clock, cfg_);
  }

private:
  PolicyConfig cfg_;
};

Policy make_policy(const PolicyConfig& cfg);

}  // namespace cacesim

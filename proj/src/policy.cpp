#include "cacesim/policy.hpp"

#include <algorithm>
#include <cmath>

namespace cacesim {

std::string_view to_string(P1Mode m) {
  switch (m) {
    case P1Mode::ProseConsistent: return "prose";
    case P1Mode::Verbatim: return "verbatim";
  }
  throw SimError("invalid p1 mode value");
}

P1Mode p1_mode_from_string(std::string_view s) {
  if (s == "prose") return P1Mode::ProseConsistent;
  if (s == "verbatim") return P1Mode::Verbatim;
  throw ParseError("unknown p1 mode: " + std::string(s));
}

LookaheadWindow dedup_window(const std::vector<std::string>& pending_model_ids,
                             int length) {
  if (length < 1) throw SimError("dedup_window: length must be >= 1");
  LookaheadWindow window;
  window.length = length;
  const std::size_t limit =
      std::min(pending_model_ids.size(), static_cast<std::size_t>(length));
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& id = pending_model_ids[i];
    if (std::find(window.model_ids.begin(), window.model_ids.end(), id) ==
        window.model_ids.end()) {
      window.model_ids.push_back(id);
    }
  }
  return window;
}

ScoreBreakdown eviction_score(const ResidencyEntry& entry,
                              const ModelDescriptor& descriptor,
                              const LookaheadWindow& window, double clock,
                              const PolicyConfig& cfg) {
  if (clock < entry.last_used_s) {
    throw SimError("eviction_score: clock precedes last_used_s for " +
                   entry.model_id);
  }
  ScoreBreakdown s;
  s.model_id = entry.model_id;

  const double t = std::max(clock - entry.last_used_s, 1.0);
  const double p1_verbatim = 1.0 / (1.0 + std::log(t));
  s.p1_recency =
      (cfg.p1_mode == P1Mode::Verbatim) ? p1_verbatim : 1.0 - p1_verbatim;

  s.p2_reload = 1.0 / (1.0 + descriptor.load_time_s / 100.0);

  auto it = std::find(window.model_ids.begin(), window.model_ids.end(),
                      entry.model_id);
  if (it == window.model_ids.end()) {
    s.p3_future = 1.0;
  } else {
    s.p3_future =
        static_cast<double>(it - window.model_ids.begin()) / window.length;
  }

  s.p4_criticality = cfg.w1 * (static_cast<double>(descriptor.expected_output_tokens) /
                               cfg.output_token_normalizer);

  switch (cfg.variant) {
    case Variant::CaceMinusP1: s.p1_recency = 0.0; break;
    case Variant::CaceMinusP2: s.p2_reload = 0.0; break;
    case Variant::CaceMinusP3: s.p3_future = 0.0; break;
    case Variant::CaceMinusP4: s.p4_criticality = 0.0; break;
    default: break;
  }
  s.total = s.p1_recency + s.p2_reload + s.p3_future + s.p4_criticality;
  return s;
}

std::optional<std::string> select_victim(const ResidencySet& residency,
                                         const LookaheadWindow& window,
                                         const ModelCatalog& catalog,
                                         double clock,
                                         const PolicyConfig& cfg) {
  std::vector<const ResidencyEntry*> idle;
  for (const auto& e : residency.entries) {
    if (!e.busy) idle.push_back(&e);
  }
  if (idle.empty()) return std::nullopt;

  // Ascending last accessed time; ties by model_id for determinism.
  std::sort(idle.begin(), idle.end(),
            [](const ResidencyEntry* a, const ResidencyEntry* b) {
              if (a->last_used_s != b->last_used_s) {
                return a->last_used_s < b->last_used_s;
              }
              return a->model_id < b->model_id;
            });

  if (cfg.variant == Variant::Lru) return idle.front()->model_id;

  const ResidencyEntry* best = nullptr;
  double best_total = 0.0;
  for (const ResidencyEntry* e : idle) {
    ScoreBreakdown s =
        eviction_score(*e, catalog.by_id(e->model_id), window, clock, cfg);
    if (best == nullptr || s.total > best_total) {
      best = e;
      best_total = s.total;
    }
    // Equal totals keep the earlier entry: the sort order already encodes
    // the (last_used_s, model_id) tie-break.
  }
  return best->model_id;
}

Policy make_policy(const PolicyConfig& cfg) { return Policy(cfg); }

}  // namespace cacesim

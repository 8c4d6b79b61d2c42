#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "cacesim/policy.hpp"
#include "cacesim/types.hpp"

using namespace cacesim;

namespace {

ModelCatalog default_catalog() { return ModelCatalog::build_default(); }

ResidencyEntry entry(std::string id, double last_used, bool busy = false) {
  return ResidencyEntry{std::move(id), last_used, busy};
}

}  // namespace

TEST_CASE("dedup_window keeps first occurrences of the queue prefix") {
  std::vector<std::string> pending = {"a", "b", "a", "c", "b", "d", "e"};
  LookaheadWindow w = dedup_window(pending, 5);
  CHECK(w.length == 5);
  CHECK(w.model_ids == std::vector<std::string>{"a", "b", "c"});

  w = dedup_window(pending, 2);
  CHECK(w.model_ids == std::vector<std::string>{"a", "b"});

  w = dedup_window({}, 10);
  CHECK(w.model_ids.empty());

  CHECK_THROWS_AS(dedup_window(pending, 0), SimError);
}

TEST_CASE("eviction score factor spot checks") {
  ModelCatalog cat = default_catalog();
  PolicyConfig cfg;
  cfg.variant = Variant::CaceFull;
  cfg.w1 = 1.0;
  cfg.window_length = 10;
  cfg.output_token_normalizer = 600;

  ModelDescriptor m = cat.by_id("java-completion");

  SUBCASE("p2 halves at load time 100") {
    m.load_time_s = 100.0;
    LookaheadWindow w;
    ScoreBreakdown s = eviction_score(entry(m.model_id, 0.0), m, w, 10.0, cfg);
    CHECK(s.p2_reload == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("p3 is 1 when the model is absent from the window") {
    LookaheadWindow w = dedup_window({"go-reasoning"}, 10);
    ScoreBreakdown s = eviction_score(entry(m.model_id, 0.0), m, w, 10.0, cfg);
    CHECK(s.p3_future == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("p3 is 0 for the next-needed model") {
    LookaheadWindow w = dedup_window({m.model_id, "go-reasoning"}, 10);
    ScoreBreakdown s = eviction_score(entry(m.model_id, 0.0), m, w, 10.0, cfg);
    CHECK(s.p3_future == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("p3 scales with the window position") {
    LookaheadWindow w = dedup_window({"go-reasoning", m.model_id}, 10);
    ScoreBreakdown s = eviction_score(entry(m.model_id, 0.0), m, w, 10.0, cfg);
    CHECK(s.p3_future == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("verbatim p1 is exactly 1 when idle time clamps to 1") {
    cfg.p1_mode = P1Mode::Verbatim;
    LookaheadWindow w;
    ScoreBreakdown a = eviction_score(entry(m.model_id, 10.0), m, w, 10.0, cfg);
    ScoreBreakdown b = eviction_score(entry(m.model_id, 9.5), m, w, 10.0, cfg);
    CHECK(a.p1_recency == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.p1_recency == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("prose p1 is the complement of the verbatim term") {
    LookaheadWindow w;
    cfg.p1_mode = P1Mode::ProseConsistent;
    ScoreBreakdown p = eviction_score(entry(m.model_id, 0.0), m, w, 50.0, cfg);
    cfg.p1_mode = P1Mode::Verbatim;
    ScoreBreakdown v = eviction_score(entry(m.model_id, 0.0), m, w, 50.0, cfg);
    CHECK(p.p1_recency + v.p1_recency == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.p1_recency == doctest::Approx(1.0 / (1.0 + std::log(50.0))));
  }
  SUBCASE("p4 is w1-weighted normalized output tokens") {
    LookaheadWindow w;
    cfg.w1 = 0.5;
    ScoreBreakdown s = eviction_score(entry(m.model_id, 0.0), m, w, 10.0, cfg);
    CHECK(s.p4_criticality == doctest::Approx(0.5 * 50.0 / 600.0));
  }
  SUBCASE("clock behind last_used is an error") {
    LookaheadWindow w;
    CHECK_THROWS_AS(eviction_score(entry(m.model_id, 20.0), m, w, 10.0, cfg),
                    SimError);
  }
}

TEST_CASE("ablation variants zero exactly their factor") {
  ModelCatalog cat = default_catalog();
  ModelDescriptor m = cat.by_id("python-reasoning");
  LookaheadWindow w = dedup_window({"java-completion", m.model_id}, 10);
  PolicyConfig cfg;
  cfg.variant = Variant::CaceFull;
  ScoreBreakdown full = eviction_score(entry(m.model_id, 1.0), m, w, 9.0, cfg);

  auto scored = [&](Variant v) {
    PolicyConfig c = cfg;
    c.variant = v;
    return eviction_score(entry(m.model_id, 1.0), m, w, 9.0, c);
  };

  ScoreBreakdown s1 = scored(Variant::CaceMinusP1);
  CHECK(s1.p1_recency == 0.0);
  CHECK(s1.total == doctest::Approx(full.total - full.p1_recency));

  ScoreBreakdown s2 = scored(Variant::CaceMinusP2);
  CHECK(s2.p2_reload == 0.0);
  CHECK(s2.total == doctest::Approx(full.total - full.p2_reload));

  ScoreBreakdown s3 = scored(Variant::CaceMinusP3);
  CHECK(s3.p3_future == 0.0);
  CHECK(s3.total == doctest::Approx(full.total - full.p3_future));

  ScoreBreakdown s4 = scored(Variant::CaceMinusP4);
  CHECK(s4.p4_criticality == 0.0);
  CHECK(s4.total == doctest::Approx(full.total - full.p4_criticality));
}

TEST_CASE("select_victim ignores busy residents") {
  ModelCatalog cat = default_catalog();
  LookaheadWindow w;
  PolicyConfig cfg;
  cfg.variant = Variant::Lru;

  ResidencySet set;
  set.entries = {entry("java-completion", 1.0, true),
                 entry("python-completion", 2.0, false)};
  auto victim = select_victim(set, w, cat, 10.0, cfg);
  REQUIRE(victim.has_value());
  CHECK(*victim == "python-completion");

  set.entries = {entry("java-completion", 1.0, true),
                 entry("python-completion", 2.0, true)};
  CHECK(!select_victim(set, w, cat, 10.0, cfg).has_value());
}

TEST_CASE("lru picks the stalest idle resident with id tie-break") {
  ModelCatalog cat = default_catalog();
  LookaheadWindow w;
  PolicyConfig cfg;
  cfg.variant = Variant::Lru;
  ResidencySet set;
  set.entries = {entry("python-completion", 3.0), entry("go-reasoning", 3.0),
                 entry("java-reasoning", 5.0)};
  auto victim = select_victim(set, w, cat, 10.0, cfg);
  REQUIRE(victim.has_value());
  CHECK(*victim == "go-reasoning");
}

namespace {

// Brute-force reference: recompute every factor from the definition and take
// the max, preferring smaller last_used_s then smaller model_id on ties.
std::optional<std::string> oracle_victim(const ResidencySet& set,
                                         const LookaheadWindow& w,
                                         const ModelCatalog& cat, double clock,
                                         const PolicyConfig& cfg) {
  const ResidencyEntry* best = nullptr;
  double best_total = 0.0;
  for (const auto& e : set.entries) {
    if (e.busy) continue;
    double total;
    if (cfg.variant == Variant::Lru) {
      // Stalest-first maps onto max of (clock - last_used).
      total = clock - e.last_used_s;
    } else {
      const ModelDescriptor& m = cat.by_id(e.model_id);
      double t = clock - e.last_used_s;
      if (t < 1.0) t = 1.0;
      double p1 = 1.0 / (1.0 + std::log(t));
      if (cfg.p1_mode == P1Mode::ProseConsistent) p1 = 1.0 - p1;
      double p2 = 1.0 / (1.0 + m.load_time_s / 100.0);
      double p3 = 1.0;
      for (std::size_t i = 0; i < w.model_ids.size(); ++i) {
        if (w.model_ids[i] == e.model_id) {
          p3 = static_cast<double>(i) / w.length;
          break;
        }
      }
      double p4 = cfg.w1 * (static_cast<double>(m.expected_output_tokens) /
                            cfg.output_token_normalizer);
      if (cfg.variant == Variant::CaceMinusP1) p1 = 0.0;
      if (cfg.variant == Variant::CaceMinusP2) p2 = 0.0;
      if (cfg.variant == Variant::CaceMinusP3) p3 = 0.0;
      if (cfg.variant == Variant::CaceMinusP4) p4 = 0.0;
      total = p1 + p2 + p3 + p4;
    }
    bool better = false;
    if (best == nullptr || total > best_total) {
      better = true;
    } else if (total == best_total) {
      if (e.last_used_s < best->last_used_s ||
          (e.last_used_s == best->last_used_s && e.model_id < best->model_id)) {
        better = true;
      }
    }
    if (better) {
      best = &e;
      best_total = total;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->model_id;
}

}  // namespace

TEST_CASE("select_victim matches the brute-force oracle") {
  ModelCatalog cat = default_catalog();
  const auto& models = cat.models();
  Rng rng(2024);
  const Variant variants[] = {Variant::Lru,         Variant::CaceFull,
                              Variant::CaceMinusP1, Variant::CaceMinusP2,
                              Variant::CaceMinusP3, Variant::CaceMinusP4};
  for (int iter = 0; iter < 2000; ++iter) {
    ResidencySet set;
    std::size_t k = 2 + rng.bounded(3);
    std::vector<std::size_t> picks;
    while (picks.size() < k) {
      std::size_t idx = rng.bounded(models.size());
      bool dup = false;
      for (std::size_t p : picks) dup |= (p == idx);
      if (!dup) picks.push_back(idx);
    }
    double clock = 10.0 + 90.0 * rng.uniform();
    for (std::size_t idx : picks) {
      bool busy = rng.bounded(4) == 0;
      // A small chance of exact last_used ties exercises the tie-break.
      double lu = (rng.bounded(3) == 0) ? 5.0 : clock * rng.uniform();
      set.entries.push_back(entry(models[idx].model_id, lu, busy));
    }
    std::vector<std::string> pending;
    std::size_t depth = rng.bounded(12);
    for (std::size_t i = 0; i < depth; ++i) {
      pending.push_back(models[rng.bounded(models.size())].model_id);
    }
    PolicyConfig cfg;
    cfg.variant = variants[iter % 6];
    cfg.w1 = (iter % 5) * 0.5;
    cfg.window_length = 1 + static_cast<int>(rng.bounded(12));
    cfg.p1_mode = (iter % 2) ? P1Mode::Verbatim : P1Mode::ProseConsistent;
    LookaheadWindow w = dedup_window(pending, cfg.window_length);

    auto got = select_victim(set, w, cat, clock, cfg);
    auto want = oracle_victim(set, w, cat, clock, cfg);
    CHECK(got == want);
  }
}

#include <doctest.h>

#include <set>

#include "cacesim/catalog.hpp"

using namespace cacesim;

TEST_CASE("profile_model load time arithmetic") {
  ModelDescriptor m;
  m.model_id = "x";
  m.weight_bytes = 1'000'000'000LL;

  SUBCASE("identity ratio, no overhead") {
    ProfileParams p{1e9, 0.0};
    CHECK(profile_model(m, p).load_time_s == doctest::Approx(1.0));
  }
  SUBCASE("7B model at 2 GB/s plus fixed overhead") {
    m.weight_bytes = 14'000'000'000LL;
    ProfileParams p{2e9, 1.0};
    CHECK(profile_model(m, p).load_time_s == doctest::Approx(8.0));
  }
  SUBCASE("500M model at 2 GB/s plus fixed overhead") {
    ProfileParams p{2e9, 1.0};
    CHECK(profile_model(m, p).load_time_s == doctest::Approx(1.5));
  }
}

TEST_CASE("profile_model rejects non-positive inputs") {
  ModelDescriptor m;
  m.model_id = "x";
  m.weight_bytes = 0;
  CHECK_THROWS_AS(profile_model(m, ProfileParams{}), SimError);
  m.weight_bytes = 1;
  CHECK_THROWS_AS(profile_model(m, ProfileParams{0.0, 1.0}), SimError);
  CHECK_THROWS_AS(profile_model(m, ProfileParams{-1.0, 1.0}), SimError);
}

TEST_CASE("profile_model is monotone in weight size") {
  ProfileParams p{2e9, 1.0};
  double prev = 0.0;
  for (std::int64_t w = 1'000'000; w <= 64'000'000'000LL; w *= 4) {
    ModelDescriptor m;
    m.model_id = "x";
    m.weight_bytes = w;
    double t = profile_model(m, p).load_time_s;
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("default catalog has one model per (language, task_class)") {
  ModelCatalog cat = ModelCatalog::build_default();
  CHECK(cat.models().size() == 16);
  std::set<std::string> ids;
  for (Language lang : kAllLanguages) {
    for (TaskClass tc : kAllTaskClasses) {
      REQUIRE(cat.contains(lang, tc));
      const ModelDescriptor& m = cat.lookup(lang, tc);
      CHECK(m.language == lang);
      CHECK(m.task_class == tc);
      ids.insert(m.model_id);
      if (tc == TaskClass::Completion) {
        CHECK(m.param_count == 500'000'000LL);
        CHECK(m.expected_output_tokens == 50);
      } else {
        CHECK(m.param_count == 7'000'000'000LL);
        CHECK(m.expected_output_tokens == 600);
      }
      CHECK(m.weight_bytes == m.param_count * 2);
      CHECK(m.load_time_s ==
            doctest::Approx(m.weight_bytes / 2e9 + 1.0));
    }
  }
  CHECK(ids.size() == 16);  // all ids distinct
  CHECK(cat.max_expected_output_tokens() == 600);
}

TEST_CASE("lookup failures throw") {
  ModelCatalog empty;
  CHECK_THROWS_AS(empty.lookup(Language::Python, TaskClass::Completion),
                  SimError);
  CHECK_THROWS_AS(empty.by_id("python-completion"), SimError);
}

TEST_CASE("catalog serialization round-trips") {
  ModelCatalog cat = ModelCatalog::build_default();
  ModelCatalog back = ModelCatalog::load(cat.save());
  CHECK(back == cat);
}

TEST_CASE("catalog load rejects malformed input") {
  ModelCatalog cat = ModelCatalog::build_default();
  std::string text = cat.save();

  SUBCASE("truncated document") {
    CHECK_THROWS_AS(ModelCatalog::load(text.substr(0, text.size() / 2)),
                    ParseError);
  }
  SUBCASE("duplicate model_id") {
    auto pos = text.find("\"models\": [");
    REQUIRE(pos != std::string::npos);
    // Duplicate the first model record by splicing the array.
    auto models = cat.models();
    models.push_back(models.front());
    ModelCatalog dup;
    CHECK_THROWS_AS(
        dup = ModelCatalog(models, cat.profile_params()), SimError);
  }
}

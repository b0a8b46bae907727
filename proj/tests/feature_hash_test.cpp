#include "sidkit/feature_hash.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace sidkit;

TEST_CASE("fnv1a64 reference vectors") {
  // Canonical FNV-1a 64 test values, plus project-specific keys computed
  // once with an independent implementation and frozen here.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(fnv1a64("w=sett") == 0x190d19e1c3d43f39ULL);

  FeatureConfig config;  // default dimension 2^18
  CHECK(config.dimension == (1u << 18));
  CHECK(feature_index("w=sett", config) == 16185);
  CHECK(feature_index("foobar", config) == 92136);
}

TEST_CASE("feature config validation") {
  FeatureConfig config;
  CHECK_NOTHROW(config.validate());
  config.dimension = 100;  // not a power of two
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.dimension = 1u << 10;
  config.char_ngram_min = 5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.char_ngram_min = 2;
  config.hash = "md5";
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("sparse vector merges duplicates") {
  auto v = SparseVector::from_pairs({{5, 1.0}, {2, 0.5}, {5, 2.0}});
  REQUIRE(v.size() == 2);
  CHECK(v.items()[0] == std::pair<std::uint32_t, double>{2, 0.5});
  CHECK(v.items()[1] == std::pair<std::uint32_t, double>{5, 3.0});

  std::vector<double> dense(8, 0.0);
  dense[2] = 2.0;
  dense[5] = 10.0;
  CHECK(v.dot(dense) == doctest::Approx(0.5 * 2.0 + 3.0 * 10.0));
}

TEST_CASE("featurize_instance") {
  FeatureConfig config;
  config.dimension = 1u << 12;

  SUBCASE("deterministic") {
    std::vector<std::string> tokens = {"Sett", "alarm", "for", "kl.", "6"};
    auto a = featurize_instance(tokens, config);
    auto b = featurize_instance(tokens, config);
    CHECK(a.pooled == b.pooled);
    CHECK(a.per_token == b.per_token);
    CHECK(a.per_token.size() == tokens.size());
  }

  SUBCASE("single token pooled vector is the unwindowed feature set") {
    std::vector<std::string> tokens = {"Alarm"};
    auto features = featurize_instance(tokens, config);

    // Expected: identity "w=alarm" plus n-grams of "^alarm$", all weight 1
    // (mean over one token).
    std::vector<std::pair<std::uint32_t, double>> expected;
    expected.emplace_back(feature_index("w=alarm", config), 1.0);
    const std::string padded = "^alarm$";
    for (std::uint32_t n = config.char_ngram_min; n <= config.char_ngram_max;
         ++n)
      for (std::size_t i = 0; i + n <= padded.size(); ++i)
        expected.emplace_back(
            feature_index("ng=" + padded.substr(i, n), config), 1.0);
    CHECK(features.pooled == SparseVector::from_pairs(expected));
  }

  SUBCASE("casing is folded") {
    auto a = featurize_instance(std::vector<std::string>{"ALARM"}, config);
    auto b = featurize_instance(std::vector<std::string>{"alarm"}, config);
    CHECK(a.pooled == b.pooled);
  }

  SUBCASE("window features differ by position") {
    std::vector<std::string> ab = {"a", "b"};
    std::vector<std::string> ba = {"b", "a"};
    auto fab = featurize_instance(ab, config);
    auto fba = featurize_instance(ba, config);
    // Pooled is order-free, per-token context is not.
    CHECK(fab.pooled == fba.pooled);
    CHECK(fab.per_token[0] != fba.per_token[0]);
  }

  SUBCASE("all indices stay below the dimension") {
    FeatureConfig tiny;
    tiny.dimension = 64;
    auto features = featurize_instance(
        std::vector<std::string>{"sett", "alarm", "kl.", "6"}, tiny);
    for (const auto& [idx, val] : features.pooled.items()) CHECK(idx < 64);
    for (const auto& tok : features.per_token)
      for (const auto& [idx, val] : tok.items()) CHECK(idx < 64);
  }

  SUBCASE("empty token list is rejected") {
    CHECK_THROWS_AS(featurize_instance({}, config), std::invalid_argument);
  }
}

TEST_CASE("unigram presence is binary and case-folded") {
  FeatureConfig config;
  config.dimension = 1u << 12;
  std::vector<std::string> tokens = {"ka", "KA", "ka", "skjer"};
  auto v = unigram_presence(tokens, config);
  REQUIRE(v.size() == 2);
  for (const auto& [idx, val] : v.items()) CHECK(val == 1.0);
  CHECK(v.items()[0].first != v.items()[1].first);
}

#include "sidkit/silver.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "sidkit/errors.hpp"
#include "test_util.hpp"

using namespace sidkit;

namespace {

std::vector<SidInstance> pool_with_counts(std::size_t v, std::size_t t,
                                          std::size_t n, std::size_t b) {
  std::vector<SidInstance> pool;
  auto add = [&](DialectLabel d, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      SidInstance inst;
      inst.instance_id = std::string(1, dialect_code(d)) + "/" +
                         std::to_string(i);
      inst.tokens = {"tok"};
      inst.dialect = d;
      pool.push_back(inst);
    }
  };
  add(DialectLabel::West, v);
  add(DialectLabel::Troendersk, t);
  add(DialectLabel::North, n);
  add(DialectLabel::Bokmaal, b);
  return pool;
}

std::map<DialectLabel, std::size_t> counts_of(
    const std::vector<SidInstance>& instances) {
  std::map<DialectLabel, std::size_t> counts;
  for (const auto& inst : instances) ++counts[*inst.dialect];
  return counts;
}

// Proportions of the dev distribution: V 5/11, T 3/11, N 2/11, B 1/11.
DistributionSpec dev_distribution() {
  return DistributionSpec({1.0 / 11, 2.0 / 11, 3.0 / 11, 5.0 / 11});
}

}  // namespace

TEST_CASE("clean_transcription") {
  std::vector<std::string> tokens = {"æ", "#", "veit", "(mm)", "ikkje"};
  CHECK(clean_transcription(tokens) ==
        std::vector<std::string>{"æ", "veit", "ikkje"});

  std::vector<std::string> plain = {"helt", "vanlig"};
  CHECK(clean_transcription(plain) == plain);

  std::vector<std::string> only_noise = {"#", "(mm)"};
  CHECK(clean_transcription(only_noise).empty());

  SUBCASE("noise predicate details") {
    CHECK(is_transcription_noise("#"));
    CHECK(is_transcription_noise("(mm)"));
    CHECK(is_transcription_noise("()"));
    CHECK(is_transcription_noise("((ler))"));
    CHECK_FALSE(is_transcription_noise("##"));
    CHECK_FALSE(is_transcription_noise("(delvis"));
    CHECK_FALSE(is_transcription_noise("delvis)"));
    CHECK_FALSE(is_transcription_noise("vanlig"));
  }

  SUBCASE("idempotent and order preserving") {
    SplitRng rng(2);
    std::vector<std::string> pool = {"a",    "#",  "(x)", "b",
                                     "(mm)", "ja", "nei"};
    for (int round = 0; round < 100; ++round) {
      std::vector<std::string> tokens_;
      std::size_t len = rng.bounded(12);
      for (std::size_t i = 0; i < len; ++i)
        tokens_.push_back(pool[rng.bounded(pool.size())]);
      auto once = clean_transcription(tokens_);
      CHECK(clean_transcription(once) == once);
      // Order: `once` is a subsequence of tokens_.
      std::size_t cursor = 0;
      for (const auto& tok : tokens_)
        if (cursor < once.size() && once[cursor] == tok) ++cursor;
      CHECK(cursor == once.size());
    }
  }
}

TEST_CASE("filter_min_length") {
  std::vector<SidInstance> instances;
  for (std::size_t len : {19, 20, 21}) {
    SidInstance inst;
    inst.instance_id = std::to_string(len);
    inst.tokens.assign(len, "x");
    instances.push_back(inst);
  }

  SUBCASE("boundary keeps length == min") {
    auto kept = filter_min_length(instances, 20);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].tokens.size() == 20);
    CHECK(kept[1].tokens.size() == 21);
  }
  SUBCASE("min 1 keeps everything") {
    CHECK(filter_min_length(instances, 1).size() == instances.size());
  }
  SUBCASE("the pipeline settings are 20 and 40") {
    CHECK(filter_min_length(instances, 40).empty());
    CHECK(filter_min_length(instances, 20).size() == 2);
  }
  SUBCASE("min 0 is a contract violation") {
    CHECK_THROWS_AS(filter_min_length(instances, 0), std::invalid_argument);
  }
}

TEST_CASE("geo mapping") {
  auto geo = GeoMapping::load_string(
      "# city table\n"
      "Oslo\tB\n"
      "Bergen\tV\n"
      "Trondheim\tT\n"
      "Tromsø\tN\n");
  CHECK(geo.size() == 4);
  CHECK(geo.lookup("Oslo") == DialectLabel::Bokmaal);  // Eastern city -> B
  CHECK(geo.lookup("OSLO") == DialectLabel::Bokmaal);
  CHECK(geo.lookup("oslo") == DialectLabel::Bokmaal);
  CHECK(geo.lookup("TROMSØ") == DialectLabel::North);
  CHECK_FALSE(geo.lookup("Snåsa").has_value());

  CHECK_THROWS_AS(GeoMapping::load_string("Oslo\tZ\n"), ParseError);
  CHECK_THROWS_AS(GeoMapping::load_string("Oslo\n"), ParseError);
}

TEST_CASE("agreement_filter truth table") {
  using D = DialectLabel;
  using ND = NorDialLabel;

  // Rule 1: Nynorsk/Mixed discard everything.
  for (DialectLabel d : kAllDialects) {
    CHECK_FALSE(agreement_filter(d, ND::Nynorsk).has_value());
    CHECK_FALSE(agreement_filter(d, ND::Mixed).has_value());
  }
  // Rule 2: dialectal predictions win when NorDial keeps the instance.
  CHECK(agreement_filter(D::West, ND::Dialect) == D::West);
  CHECK(agreement_filter(D::North, ND::Dialect) == D::North);
  CHECK(agreement_filter(D::Troendersk, ND::Dialect) == D::Troendersk);
  CHECK(agreement_filter(D::West, ND::Bokmaal) == D::West);
  CHECK(agreement_filter(D::North, ND::Bokmaal) == D::North);
  CHECK(agreement_filter(D::Troendersk, ND::Bokmaal) == D::Troendersk);
  // Rule 3: B needs both classifiers to agree.
  CHECK(agreement_filter(D::Bokmaal, ND::Bokmaal) == D::Bokmaal);
  // Rule 4: B against Dialect is discarded.
  CHECK_FALSE(agreement_filter(D::Bokmaal, ND::Dialect).has_value());
}

TEST_CASE("nordial parsing") {
  CHECK(parse_nordial("Bokmål") == NorDialLabel::Bokmaal);
  CHECK(parse_nordial("bokmal") == NorDialLabel::Bokmaal);
  CHECK(parse_nordial("NYNORSK") == NorDialLabel::Nynorsk);
  CHECK(parse_nordial("Dialect") == NorDialLabel::Dialect);
  CHECK(parse_nordial("mixed") == NorDialLabel::Mixed);
  CHECK_FALSE(parse_nordial("riksmål").has_value());
}

TEST_CASE("distribution spec validation") {
  CHECK_NOTHROW(dev_distribution());
  CHECK_THROWS_AS(DistributionSpec({0.5, 0.5, 0.1, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec({-0.1, 0.5, 0.3, 0.3}),
                  std::invalid_argument);
  // Rounded percentages (sum 0.9999) pass through normalized().
  auto spec = DistributionSpec::normalized({0.0909, 0.1818, 0.2727, 0.4545});
  CHECK(spec.of(DialectLabel::West) == doctest::Approx(5.0 / 11).epsilon(1e-3));
  CHECK_THROWS_AS(DistributionSpec::normalized({0, 0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("downsample_to_distribution") {
  SUBCASE("worked example: pool 100/100/100/5") {
    auto pool = pool_with_counts(100, 100, 100, 5);
    auto sampled = downsample_to_distribution(pool, dev_distribution(), 3);
    auto counts = counts_of(sampled);
    CHECK(counts[DialectLabel::West] == 25);
    CHECK(counts[DialectLabel::Troendersk] == 15);
    CHECK(counts[DialectLabel::North] == 10);
    CHECK(counts[DialectLabel::Bokmaal] == 5);
    CHECK(sampled.size() == 55);
  }

  SUBCASE("brute-force oracle over random pools") {
    // Independent re-computation: the largest M whose real-valued targets
    // fit the pool, scanned exhaustively.
    SplitRng rng(9);
    for (int round = 0; round < 50; ++round) {
      std::array<std::size_t, 4> avail = {
          1 + rng.bounded(60), 1 + rng.bounded(60), 1 + rng.bounded(60),
          1 + rng.bounded(60)};
      auto pool = pool_with_counts(avail[3], avail[2], avail[1], avail[0]);
      auto spec = dev_distribution();

      std::size_t best_m = 0;
      std::size_t bound = 4 * (avail[0] + avail[1] + avail[2] + avail[3]) + 8;
      for (std::size_t m = 0; m <= bound; ++m) {
        bool ok = true;
        for (DialectLabel d : kAllDialects) {
          double target = static_cast<double>(m) * spec.of(d);
          if (target >
              static_cast<double>(avail[static_cast<int>(d)]) + 1e-9)
            ok = false;
        }
        if (ok) best_m = m;
      }

      auto sampled = downsample_to_distribution(pool, spec, round);
      auto counts = counts_of(sampled);
      for (DialectLabel d : kAllDialects) {
        auto expected = static_cast<std::size_t>(
            std::floor(static_cast<double>(best_m) * spec.of(d) + 1e-9));
        CHECK(counts[d] == expected);
      }
    }
  }

  SUBCASE("pool already matching the spec is returned whole") {
    auto pool = pool_with_counts(25, 15, 10, 5);
    auto sampled = downsample_to_distribution(pool, dev_distribution(), 1);
    CHECK(sampled.size() == pool.size());
  }

  SUBCASE("deterministic per seed, sensitive to seed") {
    auto pool = pool_with_counts(40, 30, 20, 10);
    auto a = downsample_to_distribution(pool, dev_distribution(), 5);
    auto b = downsample_to_distribution(pool, dev_distribution(), 5);
    CHECK(a == b);
  }

  SUBCASE("empty class with positive proportion errors") {
    auto pool = pool_with_counts(10, 10, 10, 0);
    CHECK_THROWS_AS(downsample_to_distribution(pool, dev_distribution(), 1),
                    std::invalid_argument);
  }

  SUBCASE("unlabeled instance errors") {
    auto pool = pool_with_counts(5, 5, 5, 5);
    pool[0].dialect.reset();
    CHECK_THROWS_AS(downsample_to_distribution(pool, dev_distribution(), 1),
                    std::invalid_argument);
  }
}

TEST_CASE("prediction pair ingestion") {
  std::istringstream in(
      "id1\tV\tDialect\n"
      "id2\tB\tBokmål\n"
      "id3\tT\tNynorsk\n");
  auto pairs = load_prediction_pairs(in);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs.at("id1").dialect == DialectLabel::West);
  CHECK(pairs.at("id1").nordial == NorDialLabel::Dialect);
  CHECK(pairs.at("id3").nordial == NorDialLabel::Nynorsk);

  std::istringstream dup("id1\tV\tDialect\nid1\tB\tBokmål\n");
  CHECK_THROWS_AS(load_prediction_pairs(dup), ParseError);
  std::istringstream bad("id1\tV\n");
  CHECK_THROWS_AS(load_prediction_pairs(bad), ParseError);
}

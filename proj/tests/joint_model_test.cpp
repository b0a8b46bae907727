#include "sidkit/joint_model.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace sidkit;
using sidkit::testing::separable_sid_corpus;

namespace {

FeatureConfig small_features(std::uint32_t dim = 1u << 10) {
  FeatureConfig config;
  config.dimension = dim;
  return config;
}

LabelVocab tiny_vocab() {
  LabelVocab vocab;
  vocab.intents = {"alpha", "beta", "gamma"};
  vocab.slot_types = {"num", "who"};
  return vocab;
}

SidInstance annotated(std::string id, std::vector<std::string> tokens,
                      std::string intent, std::vector<const char*> tags) {
  SidInstance inst;
  inst.instance_id = std::move(id);
  inst.tokens = std::move(tokens);
  inst.intent = std::move(intent);
  std::vector<SlotTag> slots;
  for (const char* t : tags) slots.push_back(*SlotTag::parse(t));
  inst.slots = std::move(slots);
  return inst;
}

std::vector<SidInstance> tiny_batch() {
  return {
      annotated("1/0", {"set", "alarm", "7"}, "alpha", {"O", "O", "B-num"}),
      annotated("2/0", {"who", "is", "Kari", "Nordmann"}, "beta",
                {"O", "O", "B-who", "I-who"}),
      annotated("3/0", {"play", "music"}, "gamma", {"O", "O"}),
  };
}

// Fills the model with deterministic pseudo-random weights.
void randomize(JointLinearModel& model, std::uint64_t seed) {
  SplitRng rng(seed);
  for (double& w : model.intent_weights()) w = rng.unit() - 0.5;
  for (double& w : model.slot_weights()) w = rng.unit() - 0.5;
  for (double& w : model.intent_bias()) w = rng.unit() - 0.5;
  for (double& w : model.slot_bias()) w = rng.unit() - 0.5;
}

double relative_error(double a, double b) {
  double denom = std::max(std::abs(a), std::abs(b));
  if (denom < 1e-8) return 0.0;
  return std::abs(a - b) / denom;
}

// Central finite differences of loss_total against every parameter.
double max_gradient_error(JointLinearModel& model,
                          std::span<const SidInstance> batch, double lambda) {
  JointGradients grads;
  multitask_loss_with_gradients(model, batch, lambda, grads);
  const double h = 1e-5;
  double worst = 0.0;
  auto check_block = [&](std::span<double> params,
                         const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      double saved = params[i];
      params[i] = saved + h;
      double up = multitask_loss(model, batch, lambda).loss_total;
      params[i] = saved - h;
      double down = multitask_loss(model, batch, lambda).loss_total;
      params[i] = saved;
      double fd = (up - down) / (2 * h);
      worst = std::max(worst, relative_error(analytic[i], fd));
    }
  };
  check_block(model.intent_weights(), grads.intent_weights);
  check_block(model.intent_bias(), grads.intent_bias);
  check_block(model.slot_weights(), grads.slot_weights);
  check_block(model.slot_bias(), grads.slot_bias);
  return worst;
}

}  // namespace

TEST_CASE("train config validation") {
  TrainConfig config;
  CHECK_NOTHROW(config.validate());
  config.lambda = 1.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.lambda = 0.7;
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.learning_rate = 0.1;
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("multitask loss on the zero model") {
  // With all-zero weights both heads are uniform, so the cross-entropy is
  // exactly log of the class count.
  JointLinearModel model(tiny_vocab(), small_features());
  auto batch = tiny_batch();
  auto loss = multitask_loss(model, batch, 0.7);
  CHECK(loss.loss_intent == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(loss.loss_slot == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(loss.loss_total ==
        doctest::Approx(0.7 * std::log(5.0) + 0.3 * std::log(3.0))
            .epsilon(1e-12));

  SUBCASE("lambda endpoints of the combination") {
    CHECK(multitask_loss(model, batch, 0.0).loss_total ==
          multitask_loss(model, batch, 0.0).loss_intent);
    CHECK(multitask_loss(model, batch, 1.0).loss_total ==
          multitask_loss(model, batch, 1.0).loss_slot);
  }

  SUBCASE("combination identity holds exactly on random models") {
    randomize(model, 99);
    for (double lambda : {0.0, 0.3, 0.7, 1.0}) {
      auto l = multitask_loss(model, batch, lambda);
      CHECK(l.loss_total ==
            l.loss_slot * lambda + l.loss_intent * (1 - lambda));
      CHECK(l.loss_slot >= 0.0);
      CHECK(l.loss_intent >= 0.0);
    }
  }
}

TEST_CASE("multitask loss matches a direct recomputation") {
  // Oracle: plain softmax cross-entropy from the public logits, no
  // log-sum-exp trick, averaged per the contract.
  auto batch = tiny_batch();
  JointLinearModel model(tiny_vocab(), small_features(1u << 8));
  randomize(model, 7);

  double intent_sum = 0.0;
  double slot_sum = 0.0;
  std::size_t tokens = 0;
  for (const auto& inst : batch) {
    auto features = featurize_instance(inst.tokens, model.feature_config());
    auto logits = model.intent_logits(features.pooled);
    double z = 0.0;
    for (double l : logits) z += std::exp(l);
    intent_sum -= std::log(
        std::exp(logits[*model.vocab().intent_index(*inst.intent)]) / z);
    for (std::size_t t = 0; t < inst.tokens.size(); ++t) {
      auto tl = model.slot_logits(features.per_token[t]);
      double zt = 0.0;
      for (double l : tl) zt += std::exp(l);
      slot_sum -= std::log(
          std::exp(tl[*model.vocab().tag_index((*inst.slots)[t])]) / zt);
      ++tokens;
    }
  }
  double expected_intent = intent_sum / static_cast<double>(batch.size());
  double expected_slot = slot_sum / static_cast<double>(tokens);

  auto loss = multitask_loss(model, batch, 0.7);
  CHECK(loss.loss_intent == doctest::Approx(expected_intent).epsilon(1e-10));
  CHECK(loss.loss_slot == doctest::Approx(expected_slot).epsilon(1e-10));
}

TEST_CASE("loss errors") {
  JointLinearModel model(tiny_vocab(), small_features());
  SUBCASE("unknown intent") {
    auto batch = tiny_batch();
    batch[0].intent = "unknown";
    CHECK_THROWS_AS(multitask_loss(model, batch, 0.7), std::invalid_argument);
  }
  SUBCASE("unknown slot type") {
    auto batch = tiny_batch();
    (*batch[0].slots)[0] = SlotTag::begin("unknown");
    CHECK_THROWS_AS(multitask_loss(model, batch, 0.7), std::invalid_argument);
  }
  SUBCASE("missing annotation") {
    auto batch = tiny_batch();
    batch[1].intent.reset();
    CHECK_THROWS_AS(multitask_loss(model, batch, 0.7), std::invalid_argument);
  }
  SUBCASE("lambda out of range") {
    CHECK_THROWS_AS(multitask_loss(model, tiny_batch(), 1.2),
                    std::invalid_argument);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  SplitRng rng(2024);
  const std::vector<std::string> types = {"num", "who"};
  for (int round = 0; round < 6; ++round) {
    JointLinearModel model(tiny_vocab(), small_features(1u << 6));
    randomize(model, 1000 + round);
    std::vector<SidInstance> batch;
    std::size_t n = 1 + rng.bounded(3);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t len = 1 + rng.bounded(4);
      SidInstance inst;
      inst.instance_id = std::to_string(i);
      for (std::size_t t = 0; t < len; ++t)
        inst.tokens.push_back("tok" + std::to_string(rng.bounded(12)));
      inst.intent = tiny_vocab().intents[rng.bounded(3)];
      inst.slots = sidkit::testing::random_bio_tags(rng, len, types);
      batch.push_back(std::move(inst));
    }
    double lambda = static_cast<double>(rng.bounded(11)) / 10.0;
    CHECK(max_gradient_error(model, batch, lambda) <= 1e-4);
  }
}

TEST_CASE("lambda endpoints zero out the other head's gradient") {
  JointLinearModel model(tiny_vocab(), small_features(1u << 6));
  randomize(model, 5);
  auto batch = tiny_batch();

  JointGradients grads;
  multitask_loss_with_gradients(model, batch, 1.0, grads);
  for (double g : grads.intent_weights) CHECK(g == 0.0);
  for (double g : grads.intent_bias) CHECK(g == 0.0);
  bool slot_nonzero = false;
  for (double g : grads.slot_weights) slot_nonzero |= g != 0.0;
  CHECK(slot_nonzero);

  multitask_loss_with_gradients(model, batch, 0.0, grads);
  for (double g : grads.slot_weights) CHECK(g == 0.0);
  for (double g : grads.slot_bias) CHECK(g == 0.0);
}

TEST_CASE("training is bit-deterministic per seed") {
  auto corpus = separable_sid_corpus(40, 11);
  auto vocab = build_vocab(corpus);
  TrainConfig config;
  config.epochs = 5;
  config.seed = 3;
  auto a = train_joint(corpus, vocab, small_features(), config);
  auto b = train_joint(corpus, vocab, small_features(), config);
  CHECK(std::equal(a.intent_weights().begin(), a.intent_weights().end(),
                   b.intent_weights().begin()));
  CHECK(std::equal(a.slot_weights().begin(), a.slot_weights().end(),
                   b.slot_weights().begin()));
  CHECK(std::equal(a.intent_bias().begin(), a.intent_bias().end(),
                   b.intent_bias().begin()));
}

TEST_CASE("training loss decreases (5% transient tolerance)") {
  auto corpus = separable_sid_corpus(20, 4);
  auto vocab = build_vocab(corpus);
  TrainConfig config;
  config.learning_rate = 0.01;
  config.epochs = 30;
  std::vector<double> history;
  train_joint(corpus, vocab, small_features(), config,
              [&](std::size_t, const LossBreakdown& loss) {
                history.push_back(loss.loss_total);
              });
  REQUIRE(history.size() == 30);
  for (std::size_t e = 1; e < history.size(); ++e)
    CHECK(history[e] <= history[e - 1] * 1.05);
  CHECK(history.back() < history.front());
}

TEST_CASE("training with lambda endpoints leaves the idle head at init") {
  auto corpus = separable_sid_corpus(30, 21);
  auto vocab = build_vocab(corpus);
  TrainConfig config;
  config.epochs = 3;

  SUBCASE("lambda 1: intent head untouched") {
    config.lambda = 1.0;
    auto model = train_joint(corpus, vocab, small_features(), config);
    for (double w : model.intent_weights()) CHECK(w == 0.0);
    for (double b : model.intent_bias()) CHECK(b == 0.0);
    bool slot_trained = false;
    for (double w : model.slot_weights()) slot_trained |= w != 0.0;
    CHECK(slot_trained);
  }
  SUBCASE("lambda 0: slot head untouched") {
    config.lambda = 0.0;
    auto model = train_joint(corpus, vocab, small_features(), config);
    for (double w : model.slot_weights()) CHECK(w == 0.0);
    for (double b : model.slot_bias()) CHECK(b == 0.0);
  }
}

TEST_CASE("predict_joint") {
  SUBCASE("zero model predicts first intent and all-O") {
    JointLinearModel model(tiny_vocab(), small_features());
    std::vector<std::string> tokens = {"a", "b"};
    auto pred = predict_joint(model, tokens);
    CHECK(pred.intent == "alpha");  // first in vocabulary order
    CHECK(pred.slots == std::vector<SlotTag>{SlotTag::outside(),
                                             SlotTag::outside()});
  }

  SUBCASE("output is always BIO-valid") {
    SplitRng rng(31);
    for (int round = 0; round < 20; ++round) {
      JointLinearModel model(tiny_vocab(), small_features(1u << 8));
      randomize(model, 400 + round);
      std::vector<std::string> tokens;
      std::size_t len = 1 + rng.bounded(8);
      for (std::size_t t = 0; t < len; ++t)
        tokens.push_back("t" + std::to_string(rng.bounded(30)));
      auto pred = predict_joint(model, tokens);
      CHECK(validate_bio(pred.slots).is_valid);
      CHECK(pred.slots.size() == tokens.size());
    }
  }

  SUBCASE("argmax is invariant to positive scaling of the logits") {
    JointLinearModel model(tiny_vocab(), small_features(1u << 8));
    randomize(model, 17);
    JointLinearModel scaled = model;
    for (double& w : scaled.intent_weights()) w *= 3.5;
    for (double& w : scaled.intent_bias()) w *= 3.5;
    for (double& w : scaled.slot_weights()) w *= 3.5;
    for (double& w : scaled.slot_bias()) w *= 3.5;
    SplitRng rng(8);
    for (int round = 0; round < 30; ++round) {
      std::vector<std::string> tokens;
      std::size_t len = 1 + rng.bounded(6);
      for (std::size_t t = 0; t < len; ++t)
        tokens.push_back("t" + std::to_string(rng.bounded(40)));
      auto a = predict_joint(model, tokens);
      auto b = predict_joint(scaled, tokens);
      CHECK(a.intent == b.intent);
      CHECK(a.slots == b.slots);
    }
  }

  SUBCASE("empty token list is rejected") {
    JointLinearModel model(tiny_vocab(), small_features());
    CHECK_THROWS_AS(predict_joint(model, {}), std::invalid_argument);
  }
}

TEST_CASE("joint model fits the separable corpus") {
  auto corpus = separable_sid_corpus(120, 1234);
  auto vocab = build_vocab(corpus);
  TrainConfig config;
  auto model = train_joint(corpus, vocab, small_features(1u << 14), config);

  // Overfitting sanity: the training set itself is nearly perfectly
  // reproduced.
  std::size_t intent_hits = 0;
  for (const auto& inst : corpus) {
    auto pred = predict_joint(model, inst.tokens);
    if (pred.intent == *inst.intent) ++intent_hits;
  }
  CHECK(static_cast<double>(intent_hits) >= 0.99 * corpus.size());
}

#include "sidkit/joint_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sidkit/text_util.hpp"

namespace sidkit {

void TrainConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("lambda must be in [0, 1]");
  if (learning_rate <= 0.0)
    throw std::invalid_argument("learning_rate must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (batch_size < 1)
    throw std::invalid_argument("batch_size must be at least 1");
  if (weight_decay < 0.0)
    throw std::invalid_argument("weight_decay must be non-negative");
}

JointLinearModel::JointLinearModel(LabelVocab vocab, FeatureConfig config)
    : vocab_(std::move(vocab)), config_(std::move(config)) {
  config_.validate();
  if (vocab_.intents.empty())
    throw std::invalid_argument("vocabulary has no intents");
  intent_weights_.assign(num_intents() * config_.dimension, 0.0);
  intent_bias_.assign(num_intents(), 0.0);
  slot_weights_.assign(num_tags() * config_.dimension, 0.0);
  slot_bias_.assign(num_tags(), 0.0);
}

std::span<const double> JointLinearModel::intent_row(std::size_t r) const {
  return std::span<const double>(intent_weights_)
      .subspan(r * config_.dimension, config_.dimension);
}

std::span<const double> JointLinearModel::slot_row(std::size_t r) const {
  return std::span<const double>(slot_weights_)
      .subspan(r * config_.dimension, config_.dimension);
}

std::vector<double> JointLinearModel::intent_logits(
    const SparseVector& pooled) const {
  std::vector<double> logits(num_intents());
  for (std::size_t r = 0; r < logits.size(); ++r)
    logits[r] = intent_bias_[r] + pooled.dot(intent_row(r));
  return logits;
}

std::vector<double> JointLinearModel::slot_logits(
    const SparseVector& token_features) const {
  std::vector<double> logits(num_tags());
  for (std::size_t r = 0; r < logits.size(); ++r)
    logits[r] = slot_bias_[r] + token_features.dot(slot_row(r));
  return logits;
}

namespace {

// Stable softmax cross-entropy. Fills probs with softmax(logits) and
// returns -log p[gold].
double softmax_cross_entropy(std::span<const double> logits, std::size_t gold,
                             std::vector<double>& probs) {
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  probs.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  double lse = max_logit + std::log(sum);
  return lse - logits[gold];
}

std::size_t argmax_first(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

// Receives d loss_total / d logit contributions: one call per (head row,
// feature vector) with the fully normalized coefficient.
struct CoefSink {
  std::function<void(bool is_intent, std::size_t row, const SparseVector& x,
                     double coef)>
      apply;
};

struct BatchTotals {
  double slot_ce_sum = 0.0;
  std::size_t token_count = 0;
  double intent_ce_sum = 0.0;
  std::size_t instance_count = 0;
};

// Single pass over the batch: accumulates both losses and, when a sink is
// given, emits per-row gradient coefficients scaled by lambda and the
// batch normalizers. Effective weights are scale * stored rows, so the
// trainer's lazy weight decay sees correct logits.
LossBreakdown scan_batch(const JointLinearModel& model,
                         std::span<const SidInstance> batch,
                         std::span<const InstanceFeatures> features,
                         double lambda, const CoefSink* sink,
                         double intent_scale = 1.0, double slot_scale = 1.0) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("lambda must be in [0, 1]");
  if (batch.empty()) throw std::invalid_argument("empty batch");

  const LabelVocab& vocab = model.vocab();
  BatchTotals totals;
  totals.instance_count = batch.size();
  for (const auto& inst : batch) {
    if (!inst.intent || !inst.slots)
      throw std::invalid_argument("instance '" + inst.instance_id +
                                  "' lacks intent or slot annotation");
    totals.token_count += inst.tokens.size();
  }

  const double intent_norm =
      (1.0 - lambda) / static_cast<double>(totals.instance_count);
  const double slot_norm = lambda / static_cast<double>(totals.token_count);

  std::vector<double> probs;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const SidInstance& inst = batch[b];
    const InstanceFeatures& feats = features[b];

    auto intent_idx = vocab.intent_index(*inst.intent);
    if (!intent_idx)
      throw std::invalid_argument("intent '" + *inst.intent +
                                  "' not in vocabulary");
    std::vector<double> logits(model.num_intents());
    for (std::size_t r = 0; r < logits.size(); ++r)
      logits[r] = model.intent_bias()[r] +
                  intent_scale * feats.pooled.dot(model.intent_row(r));
    totals.intent_ce_sum += softmax_cross_entropy(logits, *intent_idx, probs);
    if (sink && lambda < 1.0) {
      for (std::size_t r = 0; r < probs.size(); ++r) {
        double coef = (probs[r] - (r == *intent_idx ? 1.0 : 0.0)) * intent_norm;
        if (coef != 0.0) sink->apply(true, r, feats.pooled, coef);
      }
    }

    for (std::size_t t = 0; t < inst.tokens.size(); ++t) {
      auto tag_idx = vocab.tag_index((*inst.slots)[t]);
      if (!tag_idx)
        throw std::invalid_argument("tag '" + (*inst.slots)[t].to_string() +
                                    "' not in vocabulary");
      std::vector<double> tag_logits(model.num_tags());
      for (std::size_t r = 0; r < tag_logits.size(); ++r)
        tag_logits[r] = model.slot_bias()[r] +
                        slot_scale * feats.per_token[t].dot(model.slot_row(r));
      totals.slot_ce_sum +=
          softmax_cross_entropy(tag_logits, *tag_idx, probs);
      if (sink && lambda > 0.0) {
        for (std::size_t r = 0; r < probs.size(); ++r) {
          double coef = (probs[r] - (r == *tag_idx ? 1.0 : 0.0)) * slot_norm;
          if (coef != 0.0) sink->apply(false, r, feats.per_token[t], coef);
        }
      }
    }
  }

  LossBreakdown loss;
  loss.loss_slot = totals.slot_ce_sum / static_cast<double>(totals.token_count);
  loss.loss_intent =
      totals.intent_ce_sum / static_cast<double>(totals.instance_count);
  loss.loss_total = loss.loss_slot * lambda + loss.loss_intent * (1.0 - lambda);
  return loss;
}

std::vector<InstanceFeatures> featurize_all(
    std::span<const SidInstance> instances, const FeatureConfig& config) {
  std::vector<InstanceFeatures> features;
  features.reserve(instances.size());
  for (const auto& inst : instances)
    features.push_back(featurize_instance(inst.tokens, config));
  return features;
}

}  // namespace

LossBreakdown multitask_loss(const JointLinearModel& model,
                             std::span<const SidInstance> batch,
                             double lambda) {
  auto features = featurize_all(batch, model.feature_config());
  return scan_batch(model, batch, features, lambda, nullptr);
}

LossBreakdown multitask_loss_with_gradients(const JointLinearModel& model,
                                            std::span<const SidInstance> batch,
                                            double lambda,
                                            JointGradients& gradients) {
  const std::size_t dim = model.feature_config().dimension;
  gradients.intent_weights.assign(model.num_intents() * dim, 0.0);
  gradients.intent_bias.assign(model.num_intents(), 0.0);
  gradients.slot_weights.assign(model.num_tags() * dim, 0.0);
  gradients.slot_bias.assign(model.num_tags(), 0.0);

  CoefSink sink;
  sink.apply = [&](bool is_intent, std::size_t row, const SparseVector& x,
                   double coef) {
    auto& weights = is_intent ? gradients.intent_weights : gradients.slot_weights;
    auto& bias = is_intent ? gradients.intent_bias : gradients.slot_bias;
    for (const auto& [idx, val] : x.items())
      weights[row * dim + idx] += coef * val;
    bias[row] += coef;
  };

  auto features = featurize_all(batch, model.feature_config());
  return scan_batch(model, batch, features, lambda, &sink);
}

JointLinearModel train_joint(
    std::span<const SidInstance> corpus, const LabelVocab& vocab,
    const FeatureConfig& feature_config, const TrainConfig& train_config,
    const std::function<void(std::size_t epoch, const LossBreakdown&)>&
        on_epoch) {
  train_config.validate();
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");

  JointLinearModel model(vocab, feature_config);
  auto features = featurize_all(corpus, feature_config);

  // Validate labels up front so no partial training happens on bad input.
  for (const auto& inst : corpus) {
    if (!inst.intent || !inst.slots)
      throw std::invalid_argument("instance '" + inst.instance_id +
                                  "' lacks intent or slot annotation");
    if (!vocab.intent_index(*inst.intent))
      throw std::invalid_argument("intent '" + *inst.intent +
                                  "' not in vocabulary");
    for (const SlotTag& tag : *inst.slots)
      if (!vocab.tag_index(tag))
        throw std::invalid_argument("tag '" + tag.to_string() +
                                    "' not in vocabulary");
  }

  const std::size_t dim = feature_config.dimension;
  const double lr = train_config.learning_rate;
  const double lambda = train_config.lambda;

  // Weight decay is applied through per-head scale factors; weight rows are
  // stored unscaled and materialized once at the end.
  double intent_scale = 1.0;
  double slot_scale = 1.0;
  std::span<double> intent_w = model.intent_weights();
  std::span<double> slot_w = model.slot_weights();
  std::span<double> intent_b = model.intent_bias();
  std::span<double> slot_b = model.slot_bias();

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  SplitRng rng(train_config.seed);

  std::vector<SidInstance> batch;
  std::vector<InstanceFeatures> batch_features;
  std::vector<double> probs;

  // Batch-gradient contributions are buffered during the scan and applied
  // afterwards, so every logit in a batch is computed at the same weights.
  struct PendingUpdate {
    bool is_intent;
    std::size_t row;
    const SparseVector* x;
    double coef;
  };
  std::vector<PendingUpdate> pending;

  for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t start = 0; start < order.size();
         start += train_config.batch_size) {
      std::size_t stop =
          std::min(order.size(), start + train_config.batch_size);
      batch.clear();
      batch_features.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(corpus[order[k]]);
        batch_features.push_back(features[order[k]]);
      }

      pending.clear();
      CoefSink sink;
      sink.apply = [&](bool is_intent, std::size_t row, const SparseVector& x,
                       double coef) {
        pending.push_back(PendingUpdate{is_intent, row, &x, coef});
      };
      scan_batch(model, batch, batch_features, lambda, &sink, intent_scale,
                 slot_scale);

      // W <- (1 - lr*wd) * W - lr * grad, with the decay folded into the
      // scale and the gradient step rescaled to match.
      const double decay = 1.0 - lr * train_config.weight_decay;
      intent_scale *= decay;
      slot_scale *= decay;
      for (const PendingUpdate& update : pending) {
        double scale = update.is_intent ? intent_scale : slot_scale;
        std::span<double> weights = update.is_intent ? intent_w : slot_w;
        std::span<double> bias = update.is_intent ? intent_b : slot_b;
        const double step = lr * update.coef / scale;
        double* w_row = weights.data() + update.row * dim;
        for (const auto& [idx, val] : update.x->items())
          w_row[idx] -= step * val;
        bias[update.row] -= lr * update.coef;
      }
    }

    if (on_epoch) {
      auto loss = scan_batch(model, corpus, features, lambda, nullptr,
                             intent_scale, slot_scale);
      on_epoch(epoch, loss);
    }
  }

  for (double& w : intent_w) w *= intent_scale;
  for (double& w : slot_w) w *= slot_scale;
  return model;
}

Prediction predict_joint(const JointLinearModel& model,
                         std::span<const std::string> tokens) {
  if (tokens.empty())
    throw std::invalid_argument("cannot predict on an empty token list");
  auto features = featurize_instance(tokens, model.feature_config());

  Prediction pred;
  auto intent_logits = model.intent_logits(features.pooled);
  pred.intent = model.vocab().intents[argmax_first(intent_logits)];

  std::vector<SlotTag> raw;
  raw.reserve(tokens.size());
  for (const auto& token_features : features.per_token) {
    auto logits = model.slot_logits(token_features);
    raw.push_back(model.vocab().tag_at(argmax_first(logits)));
  }
  pred.slots = validate_bio(raw).repaired;
  return pred;
}

}  // namespace sidkit

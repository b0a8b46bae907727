#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sidkit/corpus.hpp"
#include "sidkit/feature_hash.hpp"

namespace sidkit {

struct TrainConfig {
  double lambda = 0.7;          // slot-loss weight in the combined loss
  double learning_rate = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double weight_decay = 1e-5;
  std::uint64_t seed = 42;

  void validate() const;  // throws std::invalid_argument
};

// Combined loss is always loss_slot * lambda + loss_intent * (1 - lambda):
// slot loss is the mean token-level cross-entropy over the batch, intent
// loss the mean instance-level cross-entropy.
struct LossBreakdown {
  double loss_slot = 0.0;
  double loss_intent = 0.0;
  double loss_total = 0.0;
};

// Linear two-head model over the shared hashed feature space: an intent
// head scored on the pooled vector and a slot head scored per token.
// Weights are dense row-major [class][dimension], zero-initialized.
class JointLinearModel {
 public:
  JointLinearModel(LabelVocab vocab, FeatureConfig config);

  const LabelVocab& vocab() const { return vocab_; }
  const FeatureConfig& feature_config() const { return config_; }

  std::size_t num_intents() const { return vocab_.intents.size(); }
  std::size_t num_tags() const { return vocab_.num_tags(); }

  std::span<double> intent_weights() { return intent_weights_; }
  std::span<const double> intent_weights() const { return intent_weights_; }
  std::span<double> slot_weights() { return slot_weights_; }
  std::span<const double> slot_weights() const { return slot_weights_; }
  std::span<double> intent_bias() { return intent_bias_; }
  std::span<const double> intent_bias() const { return intent_bias_; }
  std::span<double> slot_bias() { return slot_bias_; }
  std::span<const double> slot_bias() const { return slot_bias_; }

  std::span<const double> intent_row(std::size_t r) const;
  std::span<const double> slot_row(std::size_t r) const;

  std::vector<double> intent_logits(const SparseVector& pooled) const;
  std::vector<double> slot_logits(const SparseVector& token_features) const;

 private:
  LabelVocab vocab_;
  FeatureConfig config_;
  std::vector<double> intent_weights_;
  std::vector<double> intent_bias_;
  std::vector<double> slot_weights_;
  std::vector<double> slot_bias_;
};

struct Prediction {
  std::string intent;
  std::vector<SlotTag> slots;
};

// Dense gradients of the combined loss, same shapes as the model blocks.
// Intended for verification at small dimensions; training itself applies
// sparse updates and never materializes these.
struct JointGradients {
  std::vector<double> intent_weights;
  std::vector<double> intent_bias;
  std::vector<double> slot_weights;
  std::vector<double> slot_bias;
};

// Batch instances must carry both intent and slots, and every label must
// be in the model vocabulary; otherwise std::invalid_argument.
LossBreakdown multitask_loss(const JointLinearModel& model,
                             std::span<const SidInstance> batch,
                             double lambda);

LossBreakdown multitask_loss_with_gradients(const JointLinearModel& model,
                                            std::span<const SidInstance> batch,
                                            double lambda,
                                            JointGradients& gradients);

// Mini-batch gradient descent on the combined loss with L2 weight decay on
// the weight matrices (not biases). Data is reshuffled every epoch with
// the seeded generator; single-threaded and bit-reproducible per seed.
// When on_epoch is set it receives the full-corpus loss after each epoch.
JointLinearModel train_joint(
    std::span<const SidInstance> corpus, const LabelVocab& vocab,
    const FeatureConfig& feature_config, const TrainConfig& train_config,
    const std::function<void(std::size_t epoch, const LossBreakdown&)>&
        on_epoch = {});

// Intent by argmax over the pooled features, ties broken by vocabulary
// order; per-token argmax tags passed through BIO repair, so the returned
// sequence is always valid.
Prediction predict_joint(const JointLinearModel& model,
                         std::span<const std::string> tokens);

}  // namespace sidkit

#include "sidkit/dialect_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "sidkit/text_util.hpp"

namespace sidkit {

void SvmConfig::validate() const {
  if (regularization <= 0.0)
    throw std::invalid_argument("regularization must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  features.validate();
}

DialectClassifier DialectClassifier::svm(std::vector<DialectLabel> classes,
                                         FeatureConfig features,
                                         std::vector<double> weights) {
  if (weights.size() != classes.size() * features.dimension)
    throw std::invalid_argument("weight matrix shape mismatch");
  DialectClassifier c;
  c.kind_ = Kind::Svm;
  c.classes_ = std::move(classes);
  c.features_ = std::move(features);
  c.weights_ = std::move(weights);
  return c;
}

DialectClassifier DialectClassifier::majority(
    std::vector<DialectLabel> classes, DialectLabel label) {
  DialectClassifier c;
  c.kind_ = Kind::Majority;
  c.classes_ = std::move(classes);
  c.majority_ = label;
  return c;
}

DialectClassifier DialectClassifier::random(std::vector<DialectLabel> classes,
                                            std::vector<double> distribution,
                                            std::uint64_t seed) {
  if (distribution.size() != classes.size())
    throw std::invalid_argument("distribution size mismatch");
  double sum = std::accumulate(distribution.begin(), distribution.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("distribution must sum to 1");
  DialectClassifier c;
  c.kind_ = Kind::Random;
  c.classes_ = std::move(classes);
  c.distribution_ = std::move(distribution);
  c.seed_ = seed;
  return c;
}

std::span<const double> DialectClassifier::class_row(std::size_t r) const {
  return std::span<const double>(weights_).subspan(
      r * features_.dimension, features_.dimension);
}

DialectClassifier train_svm(std::span<const std::vector<std::string>> texts,
                            std::span<const DialectLabel> labels,
                            const SvmConfig& config) {
  config.validate();
  if (texts.size() != labels.size())
    throw std::invalid_argument("texts/labels size mismatch");
  if (texts.empty()) throw std::invalid_argument("empty training set");

  std::set<DialectLabel> observed(labels.begin(), labels.end());
  std::vector<DialectLabel> classes(observed.begin(), observed.end());
  if (classes.size() < 2)
    throw std::invalid_argument("need at least two classes to train an SVM");
  if (texts.size() < classes.size())
    throw std::invalid_argument("fewer examples than classes");

  std::vector<SparseVector> examples;
  examples.reserve(texts.size());
  for (const auto& tokens : texts)
    examples.push_back(unigram_presence(tokens, config.features));

  const std::size_t dim = config.features.dimension;
  const double reg = config.regularization;
  std::vector<double> weights(classes.size() * dim, 0.0);

  // One pass of shuffled example indices is shared by all class heads, so a
  // single step counter drives every 1/(lambda*t) schedule.
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  SplitRng rng(config.seed);

  // Lazy representation per class: w = scale * v.
  std::vector<double> scale(classes.size(), 1.0);
  std::uint64_t t = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t pos : order) {
      ++t;
      const SparseVector& x = examples[pos];
      const double eta = 1.0 / (reg * static_cast<double>(t));
      const double shrink = 1.0 - eta * reg;  // == 1 - 1/t

      for (std::size_t c = 0; c < classes.size(); ++c) {
        const int y = labels[pos] == classes[c] ? 1 : -1;
        double* v = weights.data() + c * dim;

        double dot = 0.0;
        for (const auto& [idx, val] : x.items()) dot += v[idx] * val;
        const double margin = static_cast<double>(y) * scale[c] * dot;

        if (t == 1)
          scale[c] = 1.0;  // (1 - 1/1) * w is zero and v is still zero
        else
          scale[c] *= shrink;

        if (margin < 1.0) {
          const double step = eta * static_cast<double>(y) / scale[c];
          for (const auto& [idx, val] : x.items()) v[idx] += step * val;
        }
      }
    }
  }

  for (std::size_t c = 0; c < classes.size(); ++c) {
    double* v = weights.data() + c * dim;
    for (std::size_t i = 0; i < dim; ++i) v[i] *= scale[c];
  }
  return DialectClassifier::svm(std::move(classes), config.features,
                                std::move(weights));
}

DialectClassifier fit_baseline(std::span<const DialectLabel> labels,
                               BaselineKind kind, std::uint64_t seed) {
  if (labels.empty()) throw std::invalid_argument("empty label list");

  std::map<DialectLabel, std::size_t> counts;
  for (DialectLabel l : labels) ++counts[l];
  std::vector<DialectLabel> classes;
  for (const auto& [label, n] : counts) classes.push_back(label);

  if (kind == BaselineKind::Majority) {
    DialectLabel best = classes.front();
    for (DialectLabel l : classes)
      if (counts[l] > counts[best]) best = l;
    return DialectClassifier::majority(std::move(classes), best);
  }

  std::vector<double> distribution;
  distribution.reserve(classes.size());
  for (DialectLabel l : classes)
    distribution.push_back(static_cast<double>(counts[l]) /
                           static_cast<double>(labels.size()));
  // Absorb rounding so the stored distribution sums to exactly 1.
  double rest = std::accumulate(distribution.begin(), distribution.end() - 1, 0.0);
  distribution.back() = 1.0 - rest;
  return DialectClassifier::random(std::move(classes), std::move(distribution),
                                   seed);
}

DialectLabel predict_dialect(const DialectClassifier& classifier,
                             std::span<const std::string> tokens,
                             std::size_t instance_index) {
  switch (classifier.kind()) {
    case DialectClassifier::Kind::Majority:
      return classifier.majority_label();
    case DialectClassifier::Kind::Random: {
      SeedMixer mixer;
      mixer.mix(classifier.seed())
          .mix(static_cast<std::uint64_t>(instance_index));
      SplitRng rng(mixer.value());
      const double u = rng.unit();
      double cumulative = 0.0;
      const auto& dist = classifier.distribution();
      for (std::size_t c = 0; c < dist.size(); ++c) {
        cumulative += dist[c];
        if (u < cumulative) return classifier.classes()[c];
      }
      return classifier.classes().back();
    }
    case DialectClassifier::Kind::Svm: {
      SparseVector x = unigram_presence(tokens, classifier.feature_config());
      std::size_t best = 0;
      double best_score = x.dot(classifier.class_row(0));
      for (std::size_t c = 1; c < classifier.classes().size(); ++c) {
        double score = x.dot(classifier.class_row(c));
        if (score > best_score) {
          best = c;
          best_score = score;
        }
      }
      return classifier.classes()[best];
    }
  }
  throw std::logic_error("unreachable classifier kind");
}

std::vector<DialectLabel> predict_dialects(
    const DialectClassifier& classifier,
    std::span<const SidInstance> instances) {
  std::vector<DialectLabel> out;
  out.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
    out.push_back(predict_dialect(classifier, instances[i].tokens, i));
  return out;
}

double pegasos_objective(std::span<const double> w,
                         std::span<const SparseVector> examples,
                         std::span<const int> binary_labels, double lambda) {
  if (examples.size() != binary_labels.size())
    throw std::invalid_argument("examples/labels size mismatch");
  if (examples.empty()) throw std::invalid_argument("empty example set");

  double norm_sq = 0.0;
  for (double v : w) norm_sq += v * v;
  double hinge_sum = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    double margin =
        static_cast<double>(binary_labels[i]) * examples[i].dot(w);
    hinge_sum += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * lambda * norm_sq +
         hinge_sum / static_cast<double>(examples.size());
}

std::vector<double> pegasos_subgradient(std::span<const double> w,
                                        const SparseVector& example,
                                        int binary_label, double lambda) {
  std::vector<double> grad(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) grad[i] = lambda * w[i];
  const double margin = static_cast<double>(binary_label) * example.dot(w);
  if (margin < 1.0)
    for (const auto& [idx, val] : example.items())
      grad[idx] -= static_cast<double>(binary_label) * val;
  return grad;
}

double svm_training_objective(const DialectClassifier& classifier,
                              std::span<const std::vector<std::string>> texts,
                              std::span<const DialectLabel> labels,
                              double regularization) {
  if (classifier.kind() != DialectClassifier::Kind::Svm)
    throw std::invalid_argument("objective is defined for SVM classifiers");
  std::vector<SparseVector> examples;
  examples.reserve(texts.size());
  for (const auto& tokens : texts)
    examples.push_back(unigram_presence(tokens, classifier.feature_config()));

  double total = 0.0;
  for (std::size_t c = 0; c < classifier.classes().size(); ++c) {
    std::vector<int> ys(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      ys[i] = labels[i] == classifier.classes()[c] ? 1 : -1;
    total += pegasos_objective(classifier.class_row(c), examples, ys,
                               regularization);
  }
  return total;
}

}  // namespace sidkit

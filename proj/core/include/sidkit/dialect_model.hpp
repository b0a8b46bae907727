#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sidkit/corpus.hpp"
#include "sidkit/feature_hash.hpp"

namespace sidkit {

struct SvmConfig {
  double regularization = 1e-4;  // Pegasos lambda
  std::size_t epochs = 30;
  std::uint64_t seed = 42;
  FeatureConfig features;  // unigram presence hashing; n-gram/window unused

  void validate() const;  // throws std::invalid_argument
};

enum class BaselineKind : std::uint8_t { Majority, Random };

// One of three dialect classifiers: a one-vs-rest linear SVM over hashed
// unigram presence features, a stored-majority baseline, or a baseline
// drawing from the empirical label distribution.
class DialectClassifier {
 public:
  enum class Kind : std::uint8_t { Svm, Majority, Random };

  static DialectClassifier svm(std::vector<DialectLabel> classes,
                               FeatureConfig features,
                               std::vector<double> weights);
  static DialectClassifier majority(std::vector<DialectLabel> classes,
                                    DialectLabel label);
  static DialectClassifier random(std::vector<DialectLabel> classes,
                                  std::vector<double> distribution,
                                  std::uint64_t seed);

  Kind kind() const { return kind_; }
  const std::vector<DialectLabel>& classes() const { return classes_; }
  const FeatureConfig& feature_config() const { return features_; }

  // Svm only: row-major [class][dimension].
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> class_row(std::size_t r) const;

  // Majority only.
  DialectLabel majority_label() const { return majority_; }

  // Random only.
  const std::vector<double>& distribution() const { return distribution_; }
  std::uint64_t seed() const { return seed_; }

 private:
  DialectClassifier() = default;

  Kind kind_ = Kind::Majority;
  std::vector<DialectLabel> classes_;
  FeatureConfig features_;
  std::vector<double> weights_;
  DialectLabel majority_ = DialectLabel::Bokmaal;
  std::vector<double> distribution_;
  std::uint64_t seed_ = 0;
};

// One-vs-rest linear SVM trained with Pegasos-style stochastic subgradient
// descent (step 1/(lambda*t), no projection step). Classes are the sorted
// distinct labels observed; at least two are required. Deterministic per
// seed.
DialectClassifier train_svm(std::span<const std::vector<std::string>> texts,
                            std::span<const DialectLabel> labels,
                            const SvmConfig& config);

// Majority stores the most frequent label (vocabulary-order tie-break);
// Random stores the empirical label distribution and the seed.
DialectClassifier fit_baseline(std::span<const DialectLabel> labels,
                               BaselineKind kind, std::uint64_t seed);

// Svm: argmax class score with vocabulary-order tie-break. Majority: the
// stored label. Random: a draw determined entirely by (seed,
// instance_index), so batch prediction is reproducible and pure.
DialectLabel predict_dialect(const DialectClassifier& classifier,
                             std::span<const std::string> tokens,
                             std::size_t instance_index = 0);

std::vector<DialectLabel> predict_dialects(
    const DialectClassifier& classifier,
    std::span<const SidInstance> instances);

// Regularized hinge objective of one one-vs-rest subproblem:
// lambda/2 ||w||^2 + mean_i max(0, 1 - y_i * w.x_i).
double pegasos_objective(std::span<const double> w,
                         std::span<const SparseVector> examples,
                         std::span<const int> binary_labels, double lambda);

// Subgradient of lambda/2 ||w||^2 + max(0, 1 - y * w.x) at w, dense.
// Matches finite differences wherever |1 - y * w.x| is bounded away from
// the hinge kink.
std::vector<double> pegasos_subgradient(std::span<const double> w,
                                        const SparseVector& example,
                                        int binary_label, double lambda);

// Sum of the per-class objectives over the classifier's one-vs-rest
// subproblems, used to monitor training progress. regularization must be
// the value the classifier was trained with.
double svm_training_objective(const DialectClassifier& classifier,
                              std::span<const std::vector<std::string>> texts,
                              std::span<const DialectLabel> labels,
                              double regularization);

}  // namespace sidkit

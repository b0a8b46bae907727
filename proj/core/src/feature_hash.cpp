#include "sidkit/feature_hash.hpp"

#include <algorithm>
#include <stdexcept>

#include "sidkit/text_util.hpp"

namespace sidkit {

void FeatureConfig::validate() const {
  if (dimension == 0 || (dimension & (dimension - 1)) != 0)
    throw std::invalid_argument("feature dimension must be a power of two");
  if (char_ngram_min == 0 || char_ngram_min > char_ngram_max)
    throw std::invalid_argument("need 1 <= char_ngram_min <= char_ngram_max");
  if (hash != "fnv1a64")
    throw std::invalid_argument("unknown hash function '" + hash + "'");
}

std::uint32_t feature_index(std::string_view key, const FeatureConfig& config) {
  return static_cast<std::uint32_t>(fnv1a64(key) & (config.dimension - 1));
}

SparseVector SparseVector::from_pairs(
    std::vector<std::pair<std::uint32_t, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v;
  v.items_.reserve(pairs.size());
  for (const auto& [idx, val] : pairs) {
    if (!v.items_.empty() && v.items_.back().first == idx)
      v.items_.back().second += val;
    else
      v.items_.emplace_back(idx, val);
  }
  return v;
}

void SparseVector::scale(double factor) {
  for (auto& [idx, val] : items_) val *= factor;
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& [idx, val] : items_) sum += dense[idx] * val;
  return sum;
}

namespace {

void append_ngrams(const std::string& lowered, const FeatureConfig& config,
                   std::vector<std::pair<std::uint32_t, double>>& out) {
  std::string padded;
  padded.reserve(lowered.size() + 2);
  padded.push_back('^');
  padded.append(lowered);
  padded.push_back('$');
  for (std::uint32_t n = config.char_ngram_min; n <= config.char_ngram_max;
       ++n) {
    if (padded.size() < n) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      std::string key = "ng=" + padded.substr(i, n);
      out.emplace_back(feature_index(key, config), 1.0);
    }
  }
}

}  // namespace

InstanceFeatures featurize_instance(std::span<const std::string> tokens,
                                    const FeatureConfig& config) {
  if (tokens.empty())
    throw std::invalid_argument("cannot featurize an empty token list");
  config.validate();

  std::vector<std::string> lowered(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    lowered[i] = fold_lower(tokens[i]);

  InstanceFeatures features;
  features.per_token.reserve(tokens.size());

  std::vector<std::pair<std::uint32_t, double>> pooled_pairs;
  const int window = static_cast<int>(config.window);
  const int n = static_cast<int>(tokens.size());

  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<std::uint32_t, double>> pairs;
    for (int offset = -window; offset <= window; ++offset) {
      int j = i + offset;
      if (j < 0 || j >= n) continue;
      std::string key = "w" + std::to_string(offset) + "=" + lowered[j];
      pairs.emplace_back(feature_index(key, config), 1.0);
    }
    append_ngrams(lowered[i], config, pairs);
    features.per_token.push_back(SparseVector::from_pairs(std::move(pairs)));

    pooled_pairs.emplace_back(feature_index("w=" + lowered[i], config), 1.0);
    append_ngrams(lowered[i], config, pooled_pairs);
  }

  features.pooled = SparseVector::from_pairs(std::move(pooled_pairs));
  features.pooled.scale(1.0 / static_cast<double>(n));
  return features;
}

SparseVector unigram_presence(std::span<const std::string> tokens,
                              const FeatureConfig& config) {
  config.validate();
  std::vector<std::pair<std::uint32_t, double>> pairs;
  pairs.reserve(tokens.size());
  for (const std::string& tok : tokens)
    pairs.emplace_back(feature_index("w=" + fold_lower(tok), config), 1.0);
  SparseVector counts = SparseVector::from_pairs(std::move(pairs));
  std::vector<std::pair<std::uint32_t, double>> binary;
  binary.reserve(counts.size());
  for (const auto& [idx, val] : counts.items()) binary.emplace_back(idx, 1.0);
  return SparseVector::from_pairs(std::move(binary));
}

}  // namespace sidkit

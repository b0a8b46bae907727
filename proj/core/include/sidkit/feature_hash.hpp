#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sidkit {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffsetBasis) {
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

// Hashed feature space shared by the joint model and the dialect SVM.
// dimension must be a power of two; indices are the 64-bit FNV-1a hash of
// the feature string masked to the dimension.
struct FeatureConfig {
  std::uint32_t dimension = 1u << 18;
  std::uint32_t char_ngram_min = 2;
  std::uint32_t char_ngram_max = 4;
  std::uint32_t window = 2;
  std::string hash = "fnv1a64";

  void validate() const;  // throws std::invalid_argument

  bool operator==(const FeatureConfig&) const = default;
};

std::uint32_t feature_index(std::string_view key, const FeatureConfig& config);

// Sparse vector with sorted, unique indices.
class SparseVector {
 public:
  SparseVector() = default;

  // Sorts and merges duplicate indices by summing.
  static SparseVector from_pairs(
      std::vector<std::pair<std::uint32_t, double>> pairs);

  const std::vector<std::pair<std::uint32_t, double>>& items() const {
    return items_;
  }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  void scale(double factor);

  // Dot product against one dense row.
  double dot(std::span<const double> dense) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<std::pair<std::uint32_t, double>> items_;
};

struct InstanceFeatures {
  SparseVector pooled;                   // mean of per-token identity+n-gram
  std::vector<SparseVector> per_token;   // windowed identity + center n-grams
};

// Deterministic featurization. Per-token vectors hold the lowercased token
// identity at offsets -window..+window (offset baked into the key) plus
// char n-grams of the center token over "^" + token + "$" (UTF-8 bytes).
// The pooled vector is the mean over tokens of the unwindowed identity and
// n-gram features. tokens must be non-empty.
InstanceFeatures featurize_instance(std::span<const std::string> tokens,
                                    const FeatureConfig& config);

// Binary presence of lowercased tokens; the unigram features of the
// dialect SVM.
SparseVector unigram_presence(std::span<const std::string> tokens,
                              const FeatureConfig& config);

}  // namespace sidkit

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sidkit {

// Lowercases ASCII A-Z plus the UTF-8 Latin-1 supplement uppercase range
// (covers the Norwegian letters Æ, Ø, Å). No other normalization is applied.
std::string fold_lower(std::string_view s);

// Splits on a single delimiter character; empty fields are preserved.
std::vector<std::string_view> split(std::string_view s, char delim);

std::string join(std::span<const std::string> parts, std::string_view sep);

// Deterministic pseudorandom sequence utilities. All shuffling and sampling
// in the toolkit goes through these rather than std::shuffle or
// std::uniform_int_distribution, whose outputs differ between standard
// library implementations.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Uniform draw in [0, n), n > 0.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform double in [0, 1).
  double unit();

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by a SplitRng.
template <typename T>
void seeded_shuffle(std::vector<T>& items, SplitRng& rng) {
  if (items.size() < 2) return;
  for (std::size_t i = items.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng.bounded(i + 1));
    using std::swap;
    swap(items[i], items[j]);
  }
}

// Mixes arbitrary byte strings and integers into one 64-bit seed.
class SeedMixer {
 public:
  SeedMixer& mix(std::uint64_t value);
  SeedMixer& mix(std::string_view bytes);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace sidkit

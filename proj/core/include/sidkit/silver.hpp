#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sidkit/corpus.hpp"

namespace sidkit {

// Label set of the external 4-way variety classifier whose predictions are
// ingested for agreement filtering.
enum class NorDialLabel : std::uint8_t { Bokmaal = 0, Nynorsk, Dialect, Mixed };

std::string_view nordial_name(NorDialLabel label);
// Accepts "Bokmål"/"Bokmal", "Nynorsk", "Dialect", "Mixed", case-insensitive.
std::optional<NorDialLabel> parse_nordial(std::string_view s);

// City name (case-insensitive) -> dialect label, loaded from a
// `city<TAB>dialect` TSV. The shipped table maps Eastern cities to B.
class GeoMapping {
 public:
  static GeoMapping load(std::istream& in);
  static GeoMapping load_string(std::string_view text);

  // nullopt means the city is unmapped; callers drop the instance and log.
  std::optional<DialectLabel> lookup(std::string_view city) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, DialectLabel> entries_;
};

// Target label proportions for distribution-matched downsampling.
// Proportions are non-negative and sum to 1 within 1e-9.
class DistributionSpec {
 public:
  // Validates strictly; throws std::invalid_argument.
  explicit DistributionSpec(const std::array<double, 4>& proportions);

  // Rescales arbitrary non-negative weights to sum to 1 (for CLI input like
  // "V:0.4545,..." whose rounded values only sum to 1 approximately).
  static DistributionSpec normalized(const std::array<double, 4>& weights);

  double of(DialectLabel d) const {
    return proportions_[static_cast<int>(d)];
  }

 private:
  std::array<double, 4> proportions_;
};

// True for tokens that are exactly "#" or fully enclosed in parentheses,
// the transcription noise markers removed by cleaning.
bool is_transcription_noise(std::string_view token);

// Drops noise-marker tokens; order preserved, idempotent.
std::vector<std::string> clean_transcription(std::span<const std::string> tokens);

// Keeps instances with at least min_tokens tokens (min_tokens >= 1).
std::vector<SidInstance> filter_min_length(std::span<const SidInstance> instances,
                                           std::size_t min_tokens);

// Dual-classifier agreement rule, in order:
//   1. NorDial prediction Nynorsk or Mixed        -> discard (nullopt)
//   2. dialect prediction in {N, V, T}            -> that dialect
//   3. dialect B and NorDial Bokmål               -> B
//   4. otherwise                                  -> discard
std::optional<DialectLabel> agreement_filter(DialectLabel pred_dialect,
                                             NorDialLabel pred_nordial);

// Largest sample whose real-valued per-class targets M*p_c all fit in the
// available pool, then floor(M*p_c) instances per class drawn uniformly
// without replacement. Deterministic per seed; original order preserved.
// Every instance must carry a dialect; a class with p_c > 0 but no
// instances is an error.
std::vector<SidInstance> downsample_to_distribution(
    std::span<const SidInstance> instances, const DistributionSpec& spec,
    std::uint64_t seed);

// Prediction pair for one instance, as ingested from the
// `instance_id<TAB>dialect_pred<TAB>nordial_pred` TSV.
struct PredictionPair {
  DialectLabel dialect;
  NorDialLabel nordial;
};

std::unordered_map<std::string, PredictionPair> load_prediction_pairs(
    std::istream& in);

}  // namespace sidkit

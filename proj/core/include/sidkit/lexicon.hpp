#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sidkit/corpus.hpp"

namespace sidkit {

enum class VariantPolicy : std::uint8_t { First, SeededRandom };

// Bokmål surface form -> per-dialect variant lists. Lookup is
// case-insensitive on the Bokmål form; variants keep their stored casing.
class Lexicon {
 public:
  // TSV `bokmål<TAB>dialect<TAB>variant1|variant2|...`, `#` lines are
  // comments, blank lines ignored. Rows sharing (form, dialect) merge in
  // file order with duplicate variants dropped. Throws ParseError.
  static Lexicon load(std::istream& in);
  static Lexicon load_string(std::string_view text);

  // Variant list for (form, target), empty when the form is unknown or has
  // no variants for that dialect.
  std::span<const std::string> variants(std::string_view form,
                                        DialectLabel target) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  struct Entry {
    std::array<std::vector<std::string>, 4> per_dialect;
  };
  std::unordered_map<std::string, Entry> entries_;  // key is folded form
};

// Rewrites every token whose lowercased form has variants for `target`,
// leaving slots, intent and token count untouched, and stamps the dialect.
// First picks the first listed variant; SeededRandom draws uniformly with a
// generator seeded by (seed, instance_id, token index), so repeated calls
// are identical. target must not be Bokmål.
SidInstance apply_lexicon(const SidInstance& instance, DialectLabel target,
                          const Lexicon& lexicon, VariantPolicy policy,
                          std::uint64_t seed);

// Silver corpus for dialect identification: the input (Bokmål) instances
// stamped B, followed by one mapped copy per instance for V, then T, then
// N, with "#V"/"#T"/"#N" id suffixes. Output size is exactly 4x input.
std::vector<SidInstance> generate_silver(std::span<const SidInstance> instances,
                                         const Lexicon& lexicon,
                                         VariantPolicy policy,
                                         std::uint64_t seed);

}  // namespace sidkit

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sidkit {

// The four dialect classes of the task. Enum order matches the
// lexicographic order of the single-letter codes (B < N < T < V) so that
// iterating the enum is the same as iterating the sorted vocabulary.
enum class DialectLabel : std::uint8_t { Bokmaal = 0, North, Troendersk, West };

inline constexpr std::array<DialectLabel, 4> kAllDialects = {
    DialectLabel::Bokmaal, DialectLabel::North, DialectLabel::Troendersk,
    DialectLabel::West};

char dialect_code(DialectLabel d);
std::string_view dialect_name(DialectLabel d);

// Parses exactly one of "B", "N", "T", "V"; anything else is rejected.
std::optional<DialectLabel> parse_dialect(std::string_view s);

// One BIO tag. String form is exactly "O", "B-<label>" or "I-<label>";
// Outside carries no label, Begin/Inside carry a non-empty one.
struct SlotTag {
  enum class Kind : std::uint8_t { Outside = 0, Begin, Inside };

  Kind kind = Kind::Outside;
  std::string label;

  static SlotTag outside() { return {}; }
  static SlotTag begin(std::string l) { return {Kind::Begin, std::move(l)}; }
  static SlotTag inside(std::string l) { return {Kind::Inside, std::move(l)}; }

  static std::optional<SlotTag> parse(std::string_view s);
  std::string to_string() const;

  bool is_outside() const { return kind == Kind::Outside; }
  bool operator==(const SlotTag&) const = default;
};

// One utterance: tokens plus optional slot, intent and dialect annotation.
// When slots is present its length equals tokens'.
struct SidInstance {
  std::string instance_id;
  std::vector<std::string> tokens;
  std::optional<std::vector<SlotTag>> slots;
  std::optional<std::string> intent;
  std::optional<DialectLabel> dialect;

  // Portion of instance_id before the first '/'; the whole id when there is
  // none. Instances sharing an origin key are translations of the same
  // source sentence and must never be separated across splits.
  std::string_view origin_key() const;

  // Tokens joined by single spaces; the deduplication key.
  std::string text() const;

  bool operator==(const SidInstance&) const = default;
};

// Half-open labeled token span, 0 <= start < end <= token count.
struct Span {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

// Label inventories derived from data. All orderings are lexicographic so
// that serialized models are reproducible; nothing here is ever hardcoded.
struct LabelVocab {
  std::vector<std::string> intents;
  std::vector<std::string> slot_types;
  std::vector<DialectLabel> dialects;

  // Tag inventory: "O" first, then "B-<t>", "I-<t>" per sorted slot type.
  // Size is always 2 * |slot_types| + 1.
  std::size_t num_tags() const { return 2 * slot_types.size() + 1; }
  std::vector<std::string> tags() const;
  SlotTag tag_at(std::size_t index) const;

  std::optional<std::size_t> intent_index(std::string_view intent) const;
  std::optional<std::size_t> tag_index(const SlotTag& tag) const;
  std::optional<std::size_t> dialect_index(DialectLabel d) const;

  bool operator==(const LabelVocab&) const = default;
};

// --- File I/O ---------------------------------------------------------
//
// SID block format (UTF-8): blocks separated by exactly one blank line,
// each block optional metadata lines in the order
//
//   # id = <string>
//   # intent = <string>
//   # dialect = <B|N|T|V>
//
// followed by one `<token>\t<tag>` line per token, where <tag> is a BIO tag
// or `_` meaning "this block has no slot annotation". The writer ends the
// file with a trailing blank line.

// Throws ParseError (with line number) on malformed input.
std::vector<SidInstance> parse_sid_file(std::istream& in);

// Inverse of parse_sid_file: parse(write(xs)) == xs, byte-stable across
// runs. Throws std::invalid_argument for instances that cannot be
// represented (embedded tabs/newlines, token/slot length mismatch).
void write_sid_file(std::ostream& out, std::span<const SidInstance> instances);

std::vector<SidInstance> parse_sid_string(std::string_view text);
std::string write_sid_string(std::span<const SidInstance> instances);

// --- Operations -------------------------------------------------------

struct BioValidation {
  bool is_valid = true;
  std::vector<SlotTag> repaired;
};

// A sequence is valid iff no Inside tag follows Outside, start-of-sequence,
// or a tag with a different label. Repair turns every illegal Inside into a
// Begin with the same label; valid input is returned unchanged.
BioValidation validate_bio(std::span<const SlotTag> tags);

// Maximal B-I runs, sorted by start. Input must be BIO-valid (callers
// repair first); throws std::invalid_argument otherwise.
std::vector<Span> extract_spans(std::span<const SlotTag> tags);

// Inverse direction: B at each span start, I inside, O elsewhere. Spans
// must be disjoint and within bounds.
std::vector<SlotTag> tags_from_spans(std::span<const Span> spans,
                                     std::size_t num_tokens);

// Drops every instance whose text() equals an earlier instance's; first
// occurrence wins, order is preserved. Idempotent.
std::vector<SidInstance> deduplicate(std::span<const SidInstance> instances);

struct SplitRatios {
  double train = 0.0;
  double dev = 0.0;
  double test = 0.0;
};

struct CorpusSplit {
  std::vector<SidInstance> train;
  std::vector<SidInstance> dev;
  std::vector<SidInstance> test;
};

// Contamination-safe split: whole origin-key groups are shuffled with the
// seed and assigned greedily so cumulative instance counts track the
// ratios. Ratios must be positive and sum to 1 (within 1e-9); fewer than 3
// distinct origin keys is an error.
CorpusSplit split_by_origin(std::span<const SidInstance> instances,
                            const SplitRatios& ratios, std::uint64_t seed);

// Sorted sets of the labels observed in the corpus; absent fields
// contribute nothing.
LabelVocab build_vocab(std::span<const SidInstance> instances);

}  // namespace sidkit

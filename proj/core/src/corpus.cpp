#include "sidkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "sidkit/errors.hpp"
#include "sidkit/text_util.hpp"

namespace sidkit {

char dialect_code(DialectLabel d) {
  switch (d) {
    case DialectLabel::Bokmaal: return 'B';
    case DialectLabel::North: return 'N';
    case DialectLabel::Troendersk: return 'T';
    case DialectLabel::West: return 'V';
  }
  return '?';
}

std::string_view dialect_name(DialectLabel d) {
  switch (d) {
    case DialectLabel::Bokmaal: return "Bokmål";
    case DialectLabel::North: return "North Norwegian";
    case DialectLabel::Troendersk: return "Trøndersk";
    case DialectLabel::West: return "West Norwegian";
  }
  return "?";
}

std::optional<DialectLabel> parse_dialect(std::string_view s) {
  if (s.size() != 1) return std::nullopt;
  switch (s[0]) {
    case 'B': return DialectLabel::Bokmaal;
    case 'N': return DialectLabel::North;
    case 'T': return DialectLabel::Troendersk;
    case 'V': return DialectLabel::West;
    default: return std::nullopt;
  }
}

std::optional<SlotTag> SlotTag::parse(std::string_view s) {
  if (s == "O") return SlotTag::outside();
  if (s.size() < 3 || s[1] != '-') return std::nullopt;
  if (s[0] != 'B' && s[0] != 'I') return std::nullopt;
  std::string label(s.substr(2));
  if (label.find('\t') != std::string::npos) return std::nullopt;
  return s[0] == 'B' ? SlotTag::begin(std::move(label))
                     : SlotTag::inside(std::move(label));
}

std::string SlotTag::to_string() const {
  switch (kind) {
    case Kind::Outside: return "O";
    case Kind::Begin: return "B-" + label;
    case Kind::Inside: return "I-" + label;
  }
  return "O";
}

std::string_view SidInstance::origin_key() const {
  std::string_view id = instance_id;
  std::size_t pos = id.find('/');
  return pos == std::string_view::npos ? id : id.substr(0, pos);
}

std::string SidInstance::text() const { return join(tokens, " "); }

std::vector<std::string> LabelVocab::tags() const {
  std::vector<std::string> out;
  out.reserve(num_tags());
  out.push_back("O");
  for (const auto& t : slot_types) {
    out.push_back("B-" + t);
    out.push_back("I-" + t);
  }
  return out;
}

SlotTag LabelVocab::tag_at(std::size_t index) const {
  if (index == 0) return SlotTag::outside();
  std::size_t slot = (index - 1) / 2;
  if (slot >= slot_types.size())
    throw std::invalid_argument("tag index out of range");
  return (index - 1) % 2 == 0 ? SlotTag::begin(slot_types[slot])
                              : SlotTag::inside(slot_types[slot]);
}

namespace {

template <typename T>
std::optional<std::size_t> sorted_index(const std::vector<T>& items,
                                        const T& value) {
  auto it = std::lower_bound(items.begin(), items.end(), value);
  if (it == items.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - items.begin());
}

}  // namespace

std::optional<std::size_t> LabelVocab::intent_index(
    std::string_view intent) const {
  return sorted_index(intents, std::string(intent));
}

std::optional<std::size_t> LabelVocab::tag_index(const SlotTag& tag) const {
  if (tag.is_outside()) return 0;
  auto slot = sorted_index(slot_types, tag.label);
  if (!slot) return std::nullopt;
  return 1 + 2 * *slot + (tag.kind == SlotTag::Kind::Inside ? 1 : 0);
}

std::optional<std::size_t> LabelVocab::dialect_index(DialectLabel d) const {
  auto it = std::lower_bound(dialects.begin(), dialects.end(), d);
  if (it == dialects.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - dialects.begin());
}

// --- Parsing ----------------------------------------------------------

namespace {

struct BlockState {
  std::vector<std::string> tokens;
  std::vector<SlotTag> tags;
  bool slots_absent = false;  // saw `_` in the tag column
  std::string id;
  std::optional<std::string> intent;
  std::optional<DialectLabel> dialect;
  int last_meta_rank = 0;  // id=1, intent=2, dialect=3
  std::size_t first_line = 0;

  bool empty() const { return tokens.empty() && last_meta_rank == 0; }
};

SidInstance finish_block(BlockState& b, std::size_t line_no) {
  if (b.tokens.empty())
    throw ParseError("block has no token lines", line_no);
  SidInstance inst;
  inst.instance_id = std::move(b.id);
  inst.tokens = std::move(b.tokens);
  if (!b.slots_absent) inst.slots = std::move(b.tags);
  inst.intent = std::move(b.intent);
  inst.dialect = b.dialect;
  b = BlockState{};
  return inst;
}

void parse_meta_line(BlockState& b, std::string_view line,
                     std::size_t line_no) {
  if (!b.tokens.empty())
    throw ParseError("metadata line after token lines", line_no);

  auto take = [&](std::string_view prefix, int rank) -> std::optional<std::string_view> {
    if (!line.starts_with(prefix)) return std::nullopt;
    if (b.last_meta_rank >= rank)
      throw ParseError("metadata lines out of order or duplicated", line_no);
    b.last_meta_rank = rank;
    return line.substr(prefix.size());
  };

  if (auto v = take("# id = ", 1)) {
    b.id = std::string(*v);
  } else if (auto v = take("# intent = ", 2)) {
    b.intent = std::string(*v);
  } else if (auto v = take("# dialect = ", 3)) {
    auto d = parse_dialect(*v);
    if (!d) throw ParseError("unknown dialect code '" + std::string(*v) + "'", line_no);
    b.dialect = *d;
  } else {
    throw ParseError("malformed line (expected metadata or token\\ttag)",
                     line_no);
  }
}

void parse_token_line(BlockState& b, std::string_view line,
                      std::size_t line_no) {
  auto fields = split(line, '\t');
  if (fields.size() != 2)
    throw ParseError("expected exactly one tab on token line", line_no);
  if (fields[0].empty()) throw ParseError("empty token", line_no);
  if (b.tokens.empty()) b.first_line = line_no;

  if (fields[1] == "_") {
    if (!b.tokens.empty() && !b.slots_absent)
      throw ParseError("mixed `_` and BIO tags in one block", line_no);
    b.slots_absent = true;
  } else {
    if (b.slots_absent)
      throw ParseError("mixed `_` and BIO tags in one block", line_no);
    auto tag = SlotTag::parse(fields[1]);
    if (!tag)
      throw ParseError("tag '" + std::string(fields[1]) +
                           "' does not match O|[BI]-label",
                       line_no);
    b.tags.push_back(std::move(*tag));
  }
  b.tokens.emplace_back(fields[0]);
}

}  // namespace

std::vector<SidInstance> parse_sid_file(std::istream& in) {
  std::vector<SidInstance> out;
  BlockState block;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (block.empty())
        throw ParseError("empty block (consecutive blank lines?)", line_no);
      out.push_back(finish_block(block, line_no));
    } else if (line.find('\t') != std::string::npos) {
      parse_token_line(block, line, line_no);
    } else {
      parse_meta_line(block, line, line_no);
    }
  }
  // Accept a final block without the trailing blank line.
  if (!block.empty()) out.push_back(finish_block(block, line_no));
  return out;
}

namespace {

void check_writable(std::string_view s, const char* what) {
  if (s.find('\t') != std::string_view::npos ||
      s.find('\n') != std::string_view::npos ||
      s.find('\r') != std::string_view::npos)
    throw std::invalid_argument(std::string(what) +
                                " contains tab or newline");
}

}  // namespace

void write_sid_file(std::ostream& out,
                    std::span<const SidInstance> instances) {
  for (const auto& inst : instances) {
    if (inst.tokens.empty())
      throw std::invalid_argument("instance has no tokens");
    if (inst.slots && inst.slots->size() != inst.tokens.size())
      throw std::invalid_argument("slot/token length mismatch in instance '" +
                                  inst.instance_id + "'");
    check_writable(inst.instance_id, "instance id");
    if (!inst.instance_id.empty())
      out << "# id = " << inst.instance_id << '\n';
    if (inst.intent) {
      check_writable(*inst.intent, "intent");
      out << "# intent = " << *inst.intent << '\n';
    }
    if (inst.dialect) out << "# dialect = " << dialect_code(*inst.dialect) << '\n';
    for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
      const std::string& tok = inst.tokens[i];
      if (tok.empty()) throw std::invalid_argument("empty token");
      check_writable(tok, "token");
      out << tok << '\t';
      if (inst.slots) {
        const SlotTag& tag = (*inst.slots)[i];
        if (!tag.is_outside() && tag.label.empty())
          throw std::invalid_argument("B/I tag with empty label");
        check_writable(tag.label, "tag label");
        out << tag.to_string();
      } else {
        out << '_';
      }
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<SidInstance> parse_sid_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_sid_file(in);
}

std::string write_sid_string(std::span<const SidInstance> instances) {
  std::ostringstream out;
  write_sid_file(out, instances);
  return out.str();
}

// --- BIO handling -----------------------------------------------------

BioValidation validate_bio(std::span<const SlotTag> tags) {
  BioValidation result;
  result.repaired.reserve(tags.size());
  const SlotTag* prev = nullptr;
  for (const SlotTag& tag : tags) {
    if (tag.kind == SlotTag::Kind::Inside) {
      bool legal = prev != nullptr && !prev->is_outside() &&
                   prev->label == tag.label;
      if (!legal) {
        result.is_valid = false;
        result.repaired.push_back(SlotTag::begin(tag.label));
        prev = &result.repaired.back();
        continue;
      }
    }
    result.repaired.push_back(tag);
    prev = &result.repaired.back();
  }
  return result;
}

std::vector<Span> extract_spans(std::span<const SlotTag> tags) {
  std::vector<Span> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const SlotTag& tag = tags[i];
    switch (tag.kind) {
      case SlotTag::Kind::Outside:
        break;
      case SlotTag::Kind::Begin: {
        std::size_t end = i + 1;
        while (end < tags.size() &&
               tags[end].kind == SlotTag::Kind::Inside &&
               tags[end].label == tag.label)
          ++end;
        spans.push_back(Span{tag.label, i, end});
        i = end - 1;
        break;
      }
      case SlotTag::Kind::Inside:
        throw std::invalid_argument(
            "extract_spans requires BIO-valid input (stray I- at position " +
            std::to_string(i) + ")");
    }
  }
  return spans;
}

std::vector<SlotTag> tags_from_spans(std::span<const Span> spans,
                                     std::size_t num_tokens) {
  std::vector<SlotTag> tags(num_tokens, SlotTag::outside());
  for (const Span& span : spans) {
    if (span.start >= span.end || span.end > num_tokens)
      throw std::invalid_argument("span out of bounds");
    for (std::size_t i = span.start; i < span.end; ++i) {
      if (!tags[i].is_outside())
        throw std::invalid_argument("overlapping spans");
      tags[i] = i == span.start ? SlotTag::begin(span.label)
                                : SlotTag::inside(span.label);
    }
  }
  return tags;
}

// --- Corpus operations ------------------------------------------------

std::vector<SidInstance> deduplicate(std::span<const SidInstance> instances) {
  std::vector<SidInstance> kept;
  std::unordered_set<std::string> seen;
  kept.reserve(instances.size());
  for (const auto& inst : instances) {
    if (seen.insert(inst.text()).second) kept.push_back(inst);
  }
  return kept;
}

CorpusSplit split_by_origin(std::span<const SidInstance> instances,
                            const SplitRatios& ratios, std::uint64_t seed) {
  const double sum = ratios.train + ratios.dev + ratios.test;
  if (ratios.train <= 0 || ratios.dev <= 0 || ratios.test <= 0)
    throw std::invalid_argument("split ratios must be positive");
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");

  // Origin keys in first-appearance order, with their instance counts.
  std::vector<std::string> keys;
  std::unordered_map<std::string, std::size_t> group_size;
  for (const auto& inst : instances) {
    std::string key(inst.origin_key());
    auto [it, inserted] = group_size.try_emplace(std::move(key), 0);
    if (inserted) keys.push_back(it->first);
    ++it->second;
  }
  if (keys.size() < 3)
    throw std::invalid_argument(
        "need at least 3 distinct origin keys to split, got " +
        std::to_string(keys.size()));

  SplitRng rng(seed);
  seeded_shuffle(keys, rng);

  // Greedy: each whole group goes to the split with the largest remaining
  // deficit against its final target count.
  const double total = static_cast<double>(instances.size());
  const std::array<double, 3> target = {ratios.train * total,
                                        ratios.dev * total,
                                        ratios.test * total};
  std::array<double, 3> assigned = {0, 0, 0};
  std::unordered_map<std::string_view, int> destination;
  for (const auto& key : keys) {
    int best = 0;
    double best_deficit = target[0] - assigned[0];
    for (int s = 1; s < 3; ++s) {
      double deficit = target[s] - assigned[s];
      if (deficit > best_deficit) {
        best = s;
        best_deficit = deficit;
      }
    }
    destination[key] = best;
    assigned[best] += static_cast<double>(group_size[key]);
  }

  CorpusSplit split;
  for (const auto& inst : instances) {
    switch (destination.at(inst.origin_key())) {
      case 0: split.train.push_back(inst); break;
      case 1: split.dev.push_back(inst); break;
      default: split.test.push_back(inst); break;
    }
  }
  return split;
}

LabelVocab build_vocab(std::span<const SidInstance> instances) {
  std::set<std::string> intents;
  std::set<std::string> slot_types;
  std::set<DialectLabel> dialects;
  for (const auto& inst : instances) {
    if (inst.intent) intents.insert(*inst.intent);
    if (inst.dialect) dialects.insert(*inst.dialect);
    if (inst.slots)
      for (const SlotTag& tag : *inst.slots)
        if (!tag.is_outside()) slot_types.insert(tag.label);
  }
  LabelVocab vocab;
  vocab.intents.assign(intents.begin(), intents.end());
  vocab.slot_types.assign(slot_types.begin(), slot_types.end());
  vocab.dialects.assign(dialects.begin(), dialects.end());
  return vocab;
}

}  // namespace sidkit

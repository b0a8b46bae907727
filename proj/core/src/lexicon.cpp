#include "sidkit/lexicon.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "sidkit/errors.hpp"
#include "sidkit/text_util.hpp"

namespace sidkit {

Lexicon Lexicon::load(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError("expected form<TAB>dialect<TAB>variants", line_no);
    if (fields[0].empty()) throw ParseError("empty Bokmål form", line_no);
    auto dialect = parse_dialect(fields[1]);
    if (!dialect)
      throw ParseError("unknown dialect code '" + std::string(fields[1]) + "'",
                       line_no);
    if (fields[2].empty()) throw ParseError("empty variant list", line_no);

    auto& list =
        lex.entries_[fold_lower(fields[0])].per_dialect[static_cast<int>(*dialect)];
    for (std::string_view variant : split(fields[2], '|')) {
      if (variant.empty()) throw ParseError("empty variant field", line_no);
      if (std::find(list.begin(), list.end(), variant) == list.end())
        list.emplace_back(variant);
    }
  }
  return lex;
}

Lexicon Lexicon::load_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load(in);
}

std::span<const std::string> Lexicon::variants(std::string_view form,
                                               DialectLabel target) const {
  auto it = entries_.find(fold_lower(form));
  if (it == entries_.end()) return {};
  return it->second.per_dialect[static_cast<int>(target)];
}

SidInstance apply_lexicon(const SidInstance& instance, DialectLabel target,
                          const Lexicon& lexicon, VariantPolicy policy,
                          std::uint64_t seed) {
  if (target == DialectLabel::Bokmaal)
    throw std::invalid_argument("cannot map to the source variety (B)");

  SidInstance out = instance;
  out.dialect = target;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    auto vars = lexicon.variants(out.tokens[i], target);
    if (vars.empty()) continue;
    switch (policy) {
      case VariantPolicy::First:
        out.tokens[i] = vars[0];
        break;
      case VariantPolicy::SeededRandom: {
        SeedMixer mixer;
        mixer.mix(seed).mix(instance.instance_id).mix(static_cast<std::uint64_t>(i));
        SplitRng rng(mixer.value());
        out.tokens[i] = vars[rng.bounded(vars.size())];
        break;
      }
    }
  }
  return out;
}

std::vector<SidInstance> generate_silver(std::span<const SidInstance> instances,
                                         const Lexicon& lexicon,
                                         VariantPolicy policy,
                                         std::uint64_t seed) {
  for (const auto& inst : instances)
    if (inst.dialect && *inst.dialect != DialectLabel::Bokmaal)
      throw std::invalid_argument("silver generation expects Bokmål input, '" +
                                  inst.instance_id + "' is labeled " +
                                  std::string(1, dialect_code(*inst.dialect)));

  std::vector<SidInstance> out;
  out.reserve(instances.size() * 4);
  for (const auto& inst : instances) {
    out.push_back(inst);
    out.back().dialect = DialectLabel::Bokmaal;
  }
  constexpr std::array<DialectLabel, 3> targets = {
      DialectLabel::West, DialectLabel::Troendersk, DialectLabel::North};
  for (DialectLabel target : targets) {
    for (const auto& inst : instances) {
      SidInstance mapped = apply_lexicon(inst, target, lexicon, policy, seed);
      mapped.instance_id += std::string("#") + dialect_code(target);
      out.push_back(std::move(mapped));
    }
  }
  return out;
}

}  // namespace sidkit

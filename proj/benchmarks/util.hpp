#pragma once

#include <string>
#include <vector>

#include "sidkit/corpus.hpp"
#include "sidkit/text_util.hpp"

namespace sidkit::bench {

// Deterministic annotated corpus for throughput measurements.
inline std::vector<SidInstance> synthetic_corpus(std::int64_t size) {
  static const std::vector<std::string> words = {
      "sett", "alarm", "for", "kl", "seks", "skal", "det", "bli", "sol",
      "i", "dag", "spill", "musikk", "av", "vekk", "meg", "jeg", "hva",
      "ikke", "hvordan"};
  static const std::vector<std::string> intents = {"alarm/set",
                                                   "weather/find",
                                                   "music/play"};
  static const std::vector<std::string> types = {"datetime", "location"};

  SplitRng rng(404);
  std::vector<SidInstance> corpus;
  corpus.reserve(static_cast<std::size_t>(size));
  for (std::int64_t i = 0; i < size; ++i) {
    SidInstance inst;
    inst.instance_id =
        std::to_string(rng.bounded(size / 8 + 1)) + "/" + std::to_string(i);
    std::size_t len = 4 + rng.bounded(10);
    std::vector<SlotTag> tags;
    for (std::size_t t = 0; t < len; ++t) {
      inst.tokens.push_back(words[rng.bounded(words.size())]);
      if (rng.bounded(5) == 0) {
        tags.push_back(SlotTag::begin(types[rng.bounded(types.size())]));
      } else if (!tags.empty() && !tags.back().is_outside() &&
                 rng.bounded(3) == 0) {
        tags.push_back(SlotTag::inside(tags.back().label));
      } else {
        tags.push_back(SlotTag::outside());
      }
    }
    inst.slots = std::move(tags);
    inst.intent = intents[rng.bounded(intents.size())];
    inst.dialect = kAllDialects[rng.bounded(4)];
    corpus.push_back(std::move(inst));
  }
  return corpus;
}

}  // namespace sidkit::bench

#include "sidkit/silver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sidkit/errors.hpp"
#include "sidkit/text_util.hpp"

namespace sidkit {

namespace {
constexpr double kProportionEps = 1e-9;
}

std::string_view nordial_name(NorDialLabel label) {
  switch (label) {
    case NorDialLabel::Bokmaal: return "Bokmål";
    case NorDialLabel::Nynorsk: return "Nynorsk";
    case NorDialLabel::Dialect: return "Dialect";
    case NorDialLabel::Mixed: return "Mixed";
  }
  return "?";
}

std::optional<NorDialLabel> parse_nordial(std::string_view s) {
  std::string folded = fold_lower(s);
  if (folded == "bokmål" || folded == "bokmal") return NorDialLabel::Bokmaal;
  if (folded == "nynorsk") return NorDialLabel::Nynorsk;
  if (folded == "dialect") return NorDialLabel::Dialect;
  if (folded == "mixed") return NorDialLabel::Mixed;
  return std::nullopt;
}

GeoMapping GeoMapping::load(std::istream& in) {
  GeoMapping geo;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      throw ParseError("expected city<TAB>dialect", line_no);
    if (fields[0].empty()) throw ParseError("empty city name", line_no);
    auto dialect = parse_dialect(fields[1]);
    if (!dialect)
      throw ParseError("unknown dialect code '" + std::string(fields[1]) + "'",
                       line_no);
    geo.entries_[fold_lower(fields[0])] = *dialect;
  }
  return geo;
}

GeoMapping GeoMapping::load_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load(in);
}

std::optional<DialectLabel> GeoMapping::lookup(std::string_view city) const {
  auto it = entries_.find(fold_lower(city));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

DistributionSpec::DistributionSpec(const std::array<double, 4>& proportions)
    : proportions_(proportions) {
  double sum = 0.0;
  for (double p : proportions_) {
    if (p < 0.0 || !std::isfinite(p))
      throw std::invalid_argument("distribution proportions must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProportionEps)
    throw std::invalid_argument("distribution proportions must sum to 1");
}

DistributionSpec DistributionSpec::normalized(
    const std::array<double, 4>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("distribution weights must be >= 0");
    sum += w;
  }
  if (sum <= 0.0)
    throw std::invalid_argument("distribution weights must not all be zero");
  std::array<double, 4> scaled;
  for (int i = 0; i < 4; ++i) scaled[i] = weights[i] / sum;
  // Absorb the last rounding residue so the strict constructor accepts it.
  double rest = scaled[0] + scaled[1] + scaled[2];
  scaled[3] = 1.0 - rest;
  return DistributionSpec(scaled);
}

bool is_transcription_noise(std::string_view token) {
  if (token == "#") return true;
  return token.size() >= 2 && token.front() == '(' && token.back() == ')';
}

std::vector<std::string> clean_transcription(
    std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens)
    if (!is_transcription_noise(tok)) out.push_back(tok);
  return out;
}

std::vector<SidInstance> filter_min_length(
    std::span<const SidInstance> instances, std::size_t min_tokens) {
  if (min_tokens < 1)
    throw std::invalid_argument("min_tokens must be at least 1");
  std::vector<SidInstance> out;
  for (const auto& inst : instances)
    if (inst.tokens.size() >= min_tokens) out.push_back(inst);
  return out;
}

std::optional<DialectLabel> agreement_filter(DialectLabel pred_dialect,
                                             NorDialLabel pred_nordial) {
  if (pred_nordial == NorDialLabel::Nynorsk ||
      pred_nordial == NorDialLabel::Mixed)
    return std::nullopt;
  if (pred_dialect != DialectLabel::Bokmaal) return pred_dialect;
  if (pred_nordial == NorDialLabel::Bokmaal) return DialectLabel::Bokmaal;
  return std::nullopt;
}

std::vector<SidInstance> downsample_to_distribution(
    std::span<const SidInstance> instances, const DistributionSpec& spec,
    std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 4> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!instances[i].dialect)
      throw std::invalid_argument("instance '" + instances[i].instance_id +
                                  "' has no dialect label");
    by_class[static_cast<int>(*instances[i].dialect)].push_back(i);
  }

  for (DialectLabel d : kAllDialects)
    if (spec.of(d) > 0.0 && by_class[static_cast<int>(d)].empty())
      throw std::invalid_argument(
          std::string("no instances available for class ") +
          dialect_code(d));

  // Largest M with M * p_c <= available_c for every class. Start from the
  // float quotient and nudge so rounded proportions like 5/11 don't lose or
  // gain a whole instance.
  double m_bound = std::numeric_limits<double>::infinity();
  for (DialectLabel d : kAllDialects) {
    double p = spec.of(d);
    if (p <= 0.0) continue;
    m_bound = std::min(
        m_bound, static_cast<double>(by_class[static_cast<int>(d)].size()) / p);
  }
  auto fits = [&](std::size_t m) {
    for (DialectLabel d : kAllDialects) {
      double p = spec.of(d);
      if (p <= 0.0) continue;
      if (static_cast<double>(m) * p >
          static_cast<double>(by_class[static_cast<int>(d)].size()) +
              kProportionEps)
        return false;
    }
    return true;
  };
  std::size_t m = static_cast<std::size_t>(std::floor(m_bound + kProportionEps));
  while (m > 0 && !fits(m)) --m;
  while (fits(m + 1)) ++m;

  SplitRng rng(seed);
  std::vector<std::size_t> selected;
  for (DialectLabel d : kAllDialects) {
    auto& pool = by_class[static_cast<int>(d)];
    std::size_t want = static_cast<std::size_t>(
        std::floor(static_cast<double>(m) * spec.of(d) + kProportionEps));
    // Partial Fisher-Yates: the first `want` positions are a uniform draw
    // without replacement.
    for (std::size_t i = 0; i < want; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.bounded(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    selected.insert(selected.end(), pool.begin(), pool.begin() + want);
  }
  std::sort(selected.begin(), selected.end());

  std::vector<SidInstance> out;
  out.reserve(selected.size());
  for (std::size_t idx : selected) out.push_back(instances[idx]);
  return out;
}

std::unordered_map<std::string, PredictionPair> load_prediction_pairs(
    std::istream& in) {
  std::unordered_map<std::string, PredictionPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError("expected id<TAB>dialect<TAB>nordial", line_no);
    auto dialect = parse_dialect(fields[1]);
    if (!dialect)
      throw ParseError("unknown dialect code '" + std::string(fields[1]) + "'",
                       line_no);
    auto nordial = parse_nordial(fields[2]);
    if (!nordial)
      throw ParseError("unknown NorDial label '" + std::string(fields[2]) + "'",
                       line_no);
    auto [it, inserted] = pairs.emplace(std::string(fields[0]),
                                        PredictionPair{*dialect, *nordial});
    if (!inserted)
      throw ParseError("duplicate prediction for id '" + std::string(fields[0]) +
                           "'",
                       line_no);
  }
  return pairs;
}

}  // namespace sidkit

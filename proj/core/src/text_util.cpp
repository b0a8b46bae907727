#include "sidkit/text_util.hpp"

#include <stdexcept>

namespace sidkit {

std::string fold_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c + 0x20));
      continue;
    }
    // Two-byte UTF-8: C3 80..9E is the Latin-1 supplement uppercase block
    // (minus the multiplication sign at C3 97); lowercase is +0x20.
    if (c == 0xC3 && i + 1 < s.size()) {
      unsigned char c2 = static_cast<unsigned char>(s[i + 1]);
      if (c2 >= 0x80 && c2 <= 0x9E && c2 != 0x97) {
        out.push_back(static_cast<char>(0xC3));
        out.push_back(static_cast<char>(c2 + 0x20));
        ++i;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(s.substr(start));
      return fields;
    }
    fields.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::uint64_t SplitRng::next() {
  // splitmix64; fixed constants, identical output on every platform.
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitRng::bounded(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded(0) draw");
  // Rejection sampling to avoid modulo bias.
  std::uint64_t threshold = (0 - n) % n;
  while (true) {
    std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

double SplitRng::unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SeedMixer& SeedMixer::mix(std::uint64_t value) {
  for (int b = 0; b < 8; ++b) {
    state_ ^= (value >> (8 * b)) & 0xFFu;
    state_ *= 0x100000001B3ULL;
  }
  return *this;
}

SeedMixer& SeedMixer::mix(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001B3ULL;
  }
  // Separator so that mix("ab").mix("c") differs from mix("a").mix("bc").
  state_ ^= 0xFFu;
  state_ *= 0x100000001B3ULL;
  return *this;
}

}  // namespace sidkit

#include "sidkit/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "sidkit/errors.hpp"
#include "sidkit/text_util.hpp"

namespace sidkit {

namespace {

void write_double(std::ostream& out, double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.write(buf, ptr - buf);
}

void write_row(std::ostream& out, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.put(' ');
    write_double(out, row[i]);
  }
  out.put('\n');
}

void write_feature_config(std::ostream& out, const FeatureConfig& config) {
  out << "dimension " << config.dimension << '\n'
      << "char_ngram_min " << config.char_ngram_min << '\n'
      << "char_ngram_max " << config.char_ngram_max << '\n'
      << "window " << config.window << '\n'
      << "hash " << config.hash << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string_view next() {
    if (!std::getline(in_, line_))
      throw ParseError("unexpected end of model file", line_no_);
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return line_;
  }

  // `<keyword> <rest>`; throws when the keyword differs.
  std::string_view expect(std::string_view keyword) {
    std::string_view line = next();
    if (line == keyword) return {};
    std::string prefix = std::string(keyword) + " ";
    if (!line.starts_with(prefix))
      throw ParseError("expected '" + std::string(keyword) + "', got '" +
                           std::string(line) + "'",
                       line_no_);
    return line.substr(prefix.size());
  }

  template <typename T>
  T expect_number(std::string_view keyword) {
    return parse_number<T>(expect(keyword));
  }

  template <typename T>
  T parse_number(std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                     value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw ParseError("malformed number '" + std::string(text) + "'",
                       line_no_);
    return value;
  }

  std::vector<double> read_values(std::size_t count) {
    std::vector<double> values;
    values.reserve(count);
    std::string_view line = next();
    for (std::string_view field : split(line, ' '))
      values.push_back(parse_number<double>(field));
    if (values.size() != count)
      throw ParseError("expected " + std::to_string(count) + " values, got " +
                           std::to_string(values.size()),
                       line_no_);
    return values;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

FeatureConfig read_feature_config(LineReader& reader) {
  FeatureConfig config;
  config.dimension = reader.expect_number<std::uint32_t>("dimension");
  config.char_ngram_min = reader.expect_number<std::uint32_t>("char_ngram_min");
  config.char_ngram_max = reader.expect_number<std::uint32_t>("char_ngram_max");
  config.window = reader.expect_number<std::uint32_t>("window");
  config.hash = std::string(reader.expect("hash"));
  config.validate();
  return config;
}

std::vector<std::string> read_string_list(LineReader& reader,
                                          std::string_view keyword) {
  std::size_t count = reader.expect_number<std::size_t>(keyword);
  std::vector<std::string> items;
  items.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    items.emplace_back(reader.next());
  if (!std::is_sorted(items.begin(), items.end()) ||
      std::adjacent_find(items.begin(), items.end()) != items.end())
    throw ParseError("label list '" + std::string(keyword) +
                         "' is not sorted and unique",
                     reader.line_no());
  return items;
}

std::vector<DialectLabel> read_dialect_list(LineReader& reader,
                                            std::string_view keyword) {
  std::size_t count = reader.expect_number<std::size_t>(keyword);
  std::vector<DialectLabel> items;
  items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto d = parse_dialect(reader.next());
    if (!d) throw ParseError("bad dialect code", reader.line_no());
    items.push_back(*d);
  }
  if (!std::is_sorted(items.begin(), items.end()) ||
      std::adjacent_find(items.begin(), items.end()) != items.end())
    throw ParseError("dialect list is not sorted and unique",
                     reader.line_no());
  return items;
}

void write_dialect_list(std::ostream& out, std::string_view keyword,
                        std::span<const DialectLabel> items) {
  out << keyword << ' ' << items.size() << '\n';
  for (DialectLabel d : items) out << dialect_code(d) << '\n';
}

std::vector<double> read_matrix(LineReader& reader, std::string_view keyword,
                                std::size_t rows, std::size_t cols) {
  std::string_view shape = reader.expect(keyword);
  auto fields = split(shape, ' ');
  if (fields.size() != 2 ||
      reader.parse_number<std::size_t>(fields[0]) != rows ||
      reader.parse_number<std::size_t>(fields[1]) != cols)
    throw ParseError("matrix shape mismatch for '" + std::string(keyword) +
                         "'",
                     reader.line_no());
  std::vector<double> values;
  values.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = reader.read_values(cols);
    values.insert(values.end(), row.begin(), row.end());
  }
  return values;
}

void write_matrix(std::ostream& out, std::string_view keyword,
                  std::span<const double> values, std::size_t rows,
                  std::size_t cols) {
  out << keyword << ' ' << rows << ' ' << cols << '\n';
  for (std::size_t r = 0; r < rows; ++r)
    write_row(out, values.subspan(r * cols, cols));
}

JointLinearModel read_joint_body(LineReader& reader) {
  FeatureConfig config = read_feature_config(reader);
  LabelVocab vocab;
  vocab.intents = read_string_list(reader, "intents");
  vocab.slot_types = read_string_list(reader, "slot_types");
  vocab.dialects = read_dialect_list(reader, "dialects");

  JointLinearModel model(std::move(vocab), config);
  const std::size_t dim = config.dimension;

  auto bias = reader.expect_number<std::size_t>("intent_bias");
  if (bias != model.num_intents())
    throw ParseError("intent bias size mismatch", reader.line_no());
  auto intent_bias = reader.read_values(bias);
  std::copy(intent_bias.begin(), intent_bias.end(),
            model.intent_bias().begin());

  auto intent_w = read_matrix(reader, "intent_weights", model.num_intents(), dim);
  std::copy(intent_w.begin(), intent_w.end(), model.intent_weights().begin());

  auto slot_bias_n = reader.expect_number<std::size_t>("slot_bias");
  if (slot_bias_n != model.num_tags())
    throw ParseError("slot bias size mismatch", reader.line_no());
  auto slot_bias = reader.read_values(slot_bias_n);
  std::copy(slot_bias.begin(), slot_bias.end(), model.slot_bias().begin());

  auto slot_w = read_matrix(reader, "slot_weights", model.num_tags(), dim);
  std::copy(slot_w.begin(), slot_w.end(), model.slot_weights().begin());

  reader.expect("end");
  return model;
}

DialectClassifier read_dialect_body(LineReader& reader, std::string_view kind) {
  if (kind == "svm") {
    FeatureConfig config = read_feature_config(reader);
    auto classes = read_dialect_list(reader, "classes");
    auto weights =
        read_matrix(reader, "weights", classes.size(), config.dimension);
    reader.expect("end");
    return DialectClassifier::svm(std::move(classes), std::move(config),
                                  std::move(weights));
  }
  if (kind == "majority") {
    auto classes = read_dialect_list(reader, "classes");
    auto label = parse_dialect(reader.expect("label"));
    if (!label) throw ParseError("bad majority label", reader.line_no());
    reader.expect("end");
    return DialectClassifier::majority(std::move(classes), *label);
  }
  if (kind == "random") {
    auto classes = read_dialect_list(reader, "classes");
    auto seed = reader.expect_number<std::uint64_t>("seed");
    auto count = reader.expect_number<std::size_t>("distribution");
    if (count != classes.size())
      throw ParseError("distribution size mismatch", reader.line_no());
    auto distribution = reader.read_values(count);
    reader.expect("end");
    return DialectClassifier::random(std::move(classes),
                                     std::move(distribution), seed);
  }
  throw ParseError("unknown model kind '" + std::string(kind) + "'",
                   reader.line_no());
}

std::string header_kind(LineReader& reader) {
  std::string_view rest = reader.expect("sidkit-model");
  auto fields = split(rest, ' ');
  if (fields.size() != 2)
    throw ParseError("malformed model header", reader.line_no());
  int version = reader.parse_number<int>(fields[0]);
  if (version != kModelFormatVersion)
    throw ParseError("unsupported model format version " +
                         std::to_string(version),
                     reader.line_no());
  return std::string(fields[1]);
}

}  // namespace

void save_joint_model(std::ostream& out, const JointLinearModel& model) {
  out << "sidkit-model " << kModelFormatVersion << " joint\n";
  write_feature_config(out, model.feature_config());
  const LabelVocab& vocab = model.vocab();
  out << "intents " << vocab.intents.size() << '\n';
  for (const auto& intent : vocab.intents) out << intent << '\n';
  out << "slot_types " << vocab.slot_types.size() << '\n';
  for (const auto& slot : vocab.slot_types) out << slot << '\n';
  write_dialect_list(out, "dialects", vocab.dialects);

  out << "intent_bias " << model.num_intents() << '\n';
  write_row(out, model.intent_bias());
  write_matrix(out, "intent_weights", model.intent_weights(),
               model.num_intents(), model.feature_config().dimension);
  out << "slot_bias " << model.num_tags() << '\n';
  write_row(out, model.slot_bias());
  write_matrix(out, "slot_weights", model.slot_weights(), model.num_tags(),
               model.feature_config().dimension);
  out << "end\n";
}

void save_dialect_classifier(std::ostream& out,
                             const DialectClassifier& classifier) {
  switch (classifier.kind()) {
    case DialectClassifier::Kind::Svm:
      out << "sidkit-model " << kModelFormatVersion << " svm\n";
      write_feature_config(out, classifier.feature_config());
      write_dialect_list(out, "classes", classifier.classes());
      write_matrix(out, "weights", classifier.weights(),
                   classifier.classes().size(),
                   classifier.feature_config().dimension);
      break;
    case DialectClassifier::Kind::Majority:
      out << "sidkit-model " << kModelFormatVersion << " majority\n";
      write_dialect_list(out, "classes", classifier.classes());
      out << "label " << dialect_code(classifier.majority_label()) << '\n';
      break;
    case DialectClassifier::Kind::Random:
      out << "sidkit-model " << kModelFormatVersion << " random\n";
      write_dialect_list(out, "classes", classifier.classes());
      out << "seed " << classifier.seed() << '\n';
      out << "distribution " << classifier.distribution().size() << '\n';
      write_row(out, classifier.distribution());
      break;
  }
  out << "end\n";
}

AnyModel load_model(std::istream& in) {
  LineReader reader(in);
  std::string kind = header_kind(reader);
  if (kind == "joint") return read_joint_body(reader);
  return read_dialect_body(reader, kind);
}

JointLinearModel load_joint_model(std::istream& in) {
  AnyModel model = load_model(in);
  if (auto* joint = std::get_if<JointLinearModel>(&model))
    return std::move(*joint);
  throw ParseError("expected a joint model file");
}

DialectClassifier load_dialect_classifier(std::istream& in) {
  AnyModel model = load_model(in);
  if (auto* classifier = std::get_if<DialectClassifier>(&model))
    return std::move(*classifier);
  throw ParseError("expected a dialect classifier file");
}

}  // namespace sidkit

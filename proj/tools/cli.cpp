#include "cli.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "sidkit/corpus.hpp"
#include "sidkit/dialect_model.hpp"
#include "sidkit/errors.hpp"
#include "sidkit/joint_model.hpp"
#include "sidkit/lexicon.hpp"
#include "sidkit/metrics.hpp"
#include "sidkit/model_io.hpp"
#include "sidkit/silver.hpp"
#include "sidkit/text_util.hpp"

namespace sidkit::cli {

namespace {

// File-level failures (missing or unreadable paths) map to exit code 1.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  return out;
}

std::vector<SidInstance> read_corpus(const std::string& path) {
  auto in = open_input(path);
  try {
    return parse_sid_file(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_corpus(const std::string& path,
                  std::span<const SidInstance> instances) {
  auto out = open_output(path);
  write_sid_file(out, instances);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void log_resolved_config(const CLI::App& sub) {
  std::cerr << "# resolved config [" << sub.get_name() << "]\n";
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames()[0];
    if (name == "config" || name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (i > 0) value += ",";
        value += results[i];
      }
    } else {
      value = opt->get_default_str();
    }
    std::cerr << "#   " << name << " = " << value << '\n';
  }
}

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Line-oriented `key = value` config files with `#` comments. Values fill
// in options the command line left unset; flags always win. Unknown keys
// are errors.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
      s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r'))
      s.remove_suffix(1);
    return std::string(s);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ": expected `key = value` (line " +
                        std::to_string(line_no) + ")");
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ": empty config key (line " +
                        std::to_string(line_no) + ")");
    if (!entries.emplace(key, value).second)
      throw ConfigError(path + ": duplicate key '" + key + "' (line " +
                        std::to_string(line_no) + ")");
  }
  return entries;
}

// Returns argv extended with `--key value` pairs from the config file for
// options the user did not pass. Call before CLI11 parsing.
std::vector<std::string> merge_config_args(const CLI::App& app,
                                           std::vector<std::string> args) {
  // The subcommand is the first token that is not an option.
  const CLI::App* sub = nullptr;
  for (const auto& arg : args) {
    if (arg.empty() || arg[0] == '-') continue;
    for (const CLI::App* candidate : app.get_subcommands(nullptr))
      if (candidate->get_name() == arg) sub = candidate;
    break;
  }
  if (!sub) return args;

  std::string config_path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string_view arg = args[i];
    if (!arg.starts_with("--")) continue;
    std::string_view body = arg.substr(2);
    std::size_t eq = body.find('=');
    std::string name(eq == std::string_view::npos ? body : body.substr(0, eq));
    given.insert(name);
    if (name == "config") {
      if (eq != std::string_view::npos)
        config_path = std::string(body.substr(eq + 1));
      else if (i + 1 < args.size())
        config_path = args[i + 1];
    }
  }
  if (config_path.empty()) return args;

  std::set<std::string> known;
  for (const CLI::Option* opt : sub->get_options())
    for (const auto& lname : opt->get_lnames()) known.insert(lname);

  for (const auto& [key, value] : parse_config_file(config_path)) {
    if (key == "config" || !known.contains(key))
      throw ConfigError("unknown config key '" + key + "' for subcommand '" +
                        sub->get_name() + "'");
    if (given.contains(key)) continue;  // command line wins
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

SplitRatios parse_ratios(const std::string& text) {
  auto fields = split(text, ',');
  if (fields.size() != 3)
    throw std::invalid_argument("ratios must be three comma-separated values");
  std::array<double, 3> values{};
  for (int i = 0; i < 3; ++i) {
    try {
      values[i] = std::stod(std::string(fields[i]));
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed ratio '" + std::string(fields[i]) +
                                  "'");
    }
  }
  return SplitRatios{values[0], values[1], values[2]};
}

DistributionSpec parse_distribution(const std::string& text) {
  std::array<double, 4> weights{};
  for (std::string_view field : split(text, ',')) {
    auto parts = split(field, ':');
    if (parts.size() != 2)
      throw std::invalid_argument("distribution entries look like V:0.4545");
    auto dialect = parse_dialect(parts[0]);
    if (!dialect)
      throw std::invalid_argument("unknown dialect code '" +
                                  std::string(parts[0]) + "'");
    try {
      weights[static_cast<int>(*dialect)] = std::stod(std::string(parts[1]));
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed proportion '" +
                                  std::string(parts[1]) + "'");
    }
  }
  return DistributionSpec::normalized(weights);
}

VariantPolicy parse_policy(const std::string& text) {
  if (text == "first") return VariantPolicy::First;
  if (text == "random") return VariantPolicy::SeededRandom;
  throw std::invalid_argument("policy must be 'first' or 'random'");
}

// `instance_id<TAB>city` sidecar for semi-automatic annotation.
std::unordered_map<std::string, std::string> load_city_table(
    const std::string& path) {
  auto in = open_input(path);
  std::unordered_map<std::string, std::string> cities;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      throw ParseError(path + ": expected id<TAB>city", line_no);
    cities[std::string(fields[0])] = std::string(fields[1]);
  }
  return cities;
}

// Removes noise tokens while keeping any slot annotation aligned; nullopt
// when nothing is left.
std::optional<SidInstance> clean_instance(const SidInstance& inst) {
  bool any_noise = false;
  for (const auto& tok : inst.tokens)
    if (is_transcription_noise(tok)) {
      any_noise = true;
      break;
    }
  if (!any_noise) return inst;

  SidInstance out = inst;
  out.tokens.clear();
  std::vector<SlotTag> kept_tags;
  for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
    if (is_transcription_noise(inst.tokens[i])) continue;
    out.tokens.push_back(inst.tokens[i]);
    if (inst.slots) kept_tags.push_back((*inst.slots)[i]);
  }
  if (out.tokens.empty()) return std::nullopt;
  if (inst.slots) out.slots = validate_bio(kept_tags).repaired;
  return out;
}

// --- dedup ------------------------------------------------------------

struct DedupOptions {
  std::string in;
  std::string out;
};

void run_dedup(const DedupOptions& opt) {
  auto instances = read_corpus(opt.in);
  auto kept = deduplicate(instances);
  write_corpus(opt.out, kept);
  std::cerr << "removed " << instances.size() - kept.size()
            << " duplicate instances (" << kept.size() << " kept)\n";
}

// --- split --------------------------------------------------------------

struct SplitOptions {
  std::string in;
  std::string out_prefix;
  std::string ratios = "0.7,0.15,0.15";
  std::uint64_t seed = 42;
};

void run_split(const SplitOptions& opt) {
  auto instances = read_corpus(opt.in);
  auto ratios = parse_ratios(opt.ratios);
  auto splits = split_by_origin(instances, ratios, opt.seed);
  write_corpus(opt.out_prefix + ".train.sid", splits.train);
  write_corpus(opt.out_prefix + ".dev.sid", splits.dev);
  write_corpus(opt.out_prefix + ".test.sid", splits.test);
  std::cerr << "split " << instances.size() << " instances into "
            << splits.train.size() << "/" << splits.dev.size() << "/"
            << splits.test.size() << "\n";
}

// --- augment ------------------------------------------------------------

struct AugmentOptions {
  std::string in;
  std::string out;
  std::string lexicon;
  std::string policy = "first";
  std::uint64_t seed = 42;
};

void run_augment(const AugmentOptions& opt) {
  auto instances = read_corpus(opt.in);
  auto lex_in = open_input(opt.lexicon);
  Lexicon lexicon;
  try {
    lexicon = Lexicon::load(lex_in);
  } catch (const ParseError& e) {
    throw ParseError(opt.lexicon + ": " + e.what());
  }
  auto silver =
      generate_silver(instances, lexicon, parse_policy(opt.policy), opt.seed);
  write_corpus(opt.out, silver);
  std::cerr << "augmented " << instances.size() << " -> " << silver.size()
            << " instances\n";
}

// --- annotate -----------------------------------------------------------

struct AnnotateOptions {
  std::string in;
  std::string out;
  std::string mode;
  std::string geo;
  std::string cities;
  std::string preds;
  std::string dist;
  std::size_t min_tokens = 1;
  std::uint64_t seed = 42;
};

void run_annotate(const AnnotateOptions& opt) {
  auto instances = read_corpus(opt.in);

  std::vector<SidInstance> cleaned;
  std::size_t emptied = 0;
  for (const auto& inst : instances) {
    if (auto c = clean_instance(inst))
      cleaned.push_back(std::move(*c));
    else
      ++emptied;
  }
  auto filtered = filter_min_length(cleaned, opt.min_tokens);

  std::vector<SidInstance> labeled;
  std::size_t dropped = 0;
  if (opt.mode == "semi") {
    if (opt.geo.empty() || opt.cities.empty())
      throw std::invalid_argument("--mode semi needs --geo and --cities");
    auto geo_in = open_input(opt.geo);
    GeoMapping geo;
    try {
      geo = GeoMapping::load(geo_in);
    } catch (const ParseError& e) {
      throw ParseError(opt.geo + ": " + e.what());
    }
    auto cities = load_city_table(opt.cities);
    for (auto& inst : filtered) {
      auto city = cities.find(inst.instance_id);
      if (city == cities.end()) {
        ++dropped;
        std::cerr << "no city for id '" << inst.instance_id << "', dropped\n";
        continue;
      }
      auto dialect = geo.lookup(city->second);
      if (!dialect) {
        ++dropped;
        std::cerr << "unmapped city '" << city->second << "', dropped\n";
        continue;
      }
      inst.dialect = *dialect;
      labeled.push_back(std::move(inst));
    }
  } else if (opt.mode == "auto") {
    if (opt.preds.empty())
      throw std::invalid_argument("--mode auto needs --preds");
    auto preds_in = open_input(opt.preds);
    std::unordered_map<std::string, PredictionPair> pairs;
    try {
      pairs = load_prediction_pairs(preds_in);
    } catch (const ParseError& e) {
      throw ParseError(opt.preds + ": " + e.what());
    }
    for (auto& inst : filtered) {
      auto pair = pairs.find(inst.instance_id);
      if (pair == pairs.end())
        throw ParseError(opt.preds + ": no prediction for id '" +
                         inst.instance_id + "'");
      auto verdict =
          agreement_filter(pair->second.dialect, pair->second.nordial);
      if (!verdict) {
        ++dropped;
        continue;
      }
      inst.dialect = *verdict;
      labeled.push_back(std::move(inst));
    }
  } else {
    throw std::invalid_argument("--mode must be 'semi' or 'auto'");
  }

  if (!opt.dist.empty()) {
    auto spec = parse_distribution(opt.dist);
    labeled = downsample_to_distribution(labeled, spec, opt.seed);
  }

  write_corpus(opt.out, labeled);
  std::cerr << "annotated " << labeled.size() << " instances (" << emptied
            << " emptied by cleaning, " << dropped << " dropped)\n";
}

// --- train ----------------------------------------------------------------

struct TrainOptions {
  std::string task;
  std::string in;
  std::string model_out;
  double lambda = 0.7;
  double learning_rate = 0.1;
  std::size_t epochs = 0;  // 0 = task default
  std::size_t batch_size = 32;
  double weight_decay = 1e-5;
  double svm_reg = 1e-4;
  std::uint64_t seed = 42;
  std::uint32_t dimension = 1u << 18;
  std::uint32_t ngram_min = 2;
  std::uint32_t ngram_max = 4;
  std::uint32_t window = 2;
};

FeatureConfig feature_config_from(const TrainOptions& opt) {
  FeatureConfig config;
  config.dimension = opt.dimension;
  config.char_ngram_min = opt.ngram_min;
  config.char_ngram_max = opt.ngram_max;
  config.window = opt.window;
  return config;
}

std::vector<DialectLabel> dialect_labels_of(
    std::span<const SidInstance> instances) {
  std::vector<DialectLabel> labels;
  labels.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!inst.dialect)
      throw std::invalid_argument("instance '" + inst.instance_id +
                                  "' has no dialect label");
    labels.push_back(*inst.dialect);
  }
  return labels;
}

void run_train(const TrainOptions& opt) {
  auto instances = read_corpus(opt.in);

  if (opt.task == "joint") {
    TrainConfig config;
    config.lambda = opt.lambda;
    config.learning_rate = opt.learning_rate;
    config.epochs = opt.epochs == 0 ? 50 : opt.epochs;
    config.batch_size = opt.batch_size;
    config.weight_decay = opt.weight_decay;
    config.seed = opt.seed;

    auto vocab = build_vocab(instances);
    auto model =
        train_joint(instances, vocab, feature_config_from(opt), config,
                    [](std::size_t epoch, const LossBreakdown& loss) {
                      char line[128];
                      std::snprintf(line, sizeof(line),
                                    "epoch %zu loss_total %.6f (slot %.6f, "
                                    "intent %.6f)",
                                    epoch + 1, loss.loss_total, loss.loss_slot,
                                    loss.loss_intent);
                      std::cerr << line << '\n';
                    });
    auto out = open_output(opt.model_out);
    save_joint_model(out, model);
    if (!out) throw IoError("failed writing '" + opt.model_out + "'");
    return;
  }

  if (opt.task == "svm") {
    SvmConfig config;
    config.regularization = opt.svm_reg;
    config.epochs = opt.epochs == 0 ? 30 : opt.epochs;
    config.seed = opt.seed;
    config.features = feature_config_from(opt);

    std::vector<std::vector<std::string>> texts;
    texts.reserve(instances.size());
    for (const auto& inst : instances) texts.push_back(inst.tokens);
    auto classifier =
        train_svm(texts, dialect_labels_of(instances), config);
    auto out = open_output(opt.model_out);
    save_dialect_classifier(out, classifier);
    if (!out) throw IoError("failed writing '" + opt.model_out + "'");
    return;
  }

  if (opt.task == "majority" || opt.task == "random") {
    auto kind = opt.task == "majority" ? BaselineKind::Majority
                                       : BaselineKind::Random;
    auto classifier =
        fit_baseline(dialect_labels_of(instances), kind, opt.seed);
    auto out = open_output(opt.model_out);
    save_dialect_classifier(out, classifier);
    if (!out) throw IoError("failed writing '" + opt.model_out + "'");
    return;
  }

  throw std::invalid_argument(
      "--task must be joint, svm, majority or random");
}

// --- predict ----------------------------------------------------------------

struct PredictOptions {
  std::string model;
  std::string in;
  std::string out;
};

void run_predict(const PredictOptions& opt) {
  auto model_in = open_input(opt.model);
  AnyModel model = [&] {
    try {
      return load_model(model_in);
    } catch (const ParseError& e) {
      throw ParseError(opt.model + ": " + e.what());
    }
  }();
  auto instances = read_corpus(opt.in);

  std::ostringstream buffer;
  if (const auto* joint = std::get_if<JointLinearModel>(&model)) {
    for (const auto& inst : instances) {
      auto pred = predict_joint(*joint, inst.tokens);
      buffer << inst.instance_id << '\t' << pred.intent << '\t';
      for (std::size_t t = 0; t < pred.slots.size(); ++t) {
        if (t > 0) buffer << ' ';
        buffer << pred.slots[t].to_string();
      }
      buffer << '\n';
    }
  } else {
    const auto& classifier = std::get<DialectClassifier>(model);
    auto labels = predict_dialects(classifier, instances);
    for (std::size_t i = 0; i < instances.size(); ++i)
      buffer << instances[i].instance_id << '\t' << dialect_code(labels[i])
             << '\n';
  }

  auto out = open_output(opt.out);
  out << buffer.str();
  if (!out) throw IoError("failed writing '" + opt.out + "'");
}

// --- score -----------------------------------------------------------------

struct ScoreOptions {
  std::string task;
  std::string gold;
  std::string preds;
  std::string report;
  double lambda = 0.7;
};

struct SidPrediction {
  std::string intent;
  std::vector<SlotTag> tags;
};

std::unordered_map<std::string, SidPrediction> load_sid_predictions(
    const std::string& path) {
  auto in = open_input(path);
  std::unordered_map<std::string, SidPrediction> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError(path + ": expected id<TAB>intent<TAB>tags", line_no);
    SidPrediction pred;
    pred.intent = std::string(fields[1]);
    for (std::string_view tag_str : split(fields[2], ' ')) {
      auto tag = SlotTag::parse(tag_str);
      if (!tag)
        throw ParseError(path + ": bad tag '" + std::string(tag_str) + "'",
                         line_no);
      pred.tags.push_back(std::move(*tag));
    }
    if (!preds.emplace(std::string(fields[0]), std::move(pred)).second)
      throw std::invalid_argument("duplicate prediction for id '" +
                                  std::string(fields[0]) + "'");
  }
  return preds;
}

std::unordered_map<std::string, DialectLabel> load_dialect_predictions(
    const std::string& path) {
  auto in = open_input(path);
  std::unordered_map<std::string, DialectLabel> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      throw ParseError(path + ": expected id<TAB>dialect", line_no);
    auto dialect = parse_dialect(fields[1]);
    if (!dialect)
      throw ParseError(path + ": unknown dialect code '" +
                           std::string(fields[1]) + "'",
                       line_no);
    if (!preds.emplace(std::string(fields[0]), *dialect).second)
      throw std::invalid_argument("duplicate prediction for id '" +
                                  std::string(fields[0]) + "'");
  }
  return preds;
}

// Gold ids must be unique and the prediction ids must cover them exactly.
template <typename T>
void check_id_sets(std::span<const SidInstance> gold,
                   const std::unordered_map<std::string, T>& preds) {
  std::unordered_set<std::string> gold_ids;
  for (const auto& inst : gold) {
    if (!gold_ids.insert(inst.instance_id).second)
      throw std::invalid_argument("duplicate gold id '" + inst.instance_id +
                                  "'");
    if (!preds.contains(inst.instance_id))
      throw std::invalid_argument("no prediction for gold id '" +
                                  inst.instance_id + "'");
  }
  for (const auto& [id, pred] : preds)
    if (!gold_ids.contains(id))
      throw std::invalid_argument("prediction for unknown id '" + id + "'");
}

void run_score(const ScoreOptions& opt) {
  auto gold = read_corpus(opt.gold);
  if (gold.empty()) throw std::invalid_argument("empty gold corpus");
  char buf[96];

  if (opt.task == "sid") {
    auto preds = load_sid_predictions(opt.preds);
    check_id_sets(gold, preds);

    std::vector<std::vector<SlotTag>> gold_tags;
    std::vector<std::vector<SlotTag>> pred_tags;
    std::vector<std::string> gold_intents;
    std::vector<std::string> pred_intents;
    for (const auto& inst : gold) {
      if (!inst.slots || !inst.intent)
        throw std::invalid_argument("gold instance '" + inst.instance_id +
                                    "' lacks slots or intent");
      const SidPrediction& pred = preds.at(inst.instance_id);
      if (pred.tags.size() != inst.tokens.size())
        throw std::invalid_argument("prediction length mismatch for id '" +
                                    inst.instance_id + "'");
      gold_tags.push_back(*inst.slots);
      pred_tags.push_back(pred.tags);
      gold_intents.push_back(*inst.intent);
      pred_intents.push_back(pred.intent);
    }

    SidScores scores;
    scores.slot_f1 = span_f1(gold_tags, pred_tags).f1;
    scores.intent_accuracy = intent_accuracy(gold_intents, pred_intents);
    scores.lambda_average =
        lambda_average(scores.slot_f1, scores.intent_accuracy, opt.lambda);

    if (!opt.report.empty()) {
      auto out = open_output(opt.report);
      out << "slot_type\tgold\tpredicted\tcorrect\tprecision\trecall\tf1\n";
      for (const auto& c : span_counts_by_label(gold_tags, pred_tags)) {
        double p = c.predicted == 0
                       ? 0.0
                       : static_cast<double>(c.correct) / c.predicted;
        double r =
            c.gold == 0 ? 0.0 : static_cast<double>(c.correct) / c.gold;
        double f = p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
        std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f", p, r, f);
        out << c.label << '\t' << c.gold << '\t' << c.predicted << '\t'
            << c.correct << '\t' << buf << '\n';
      }
      if (!out) throw IoError("failed writing '" + opt.report + "'");
    }

    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f", scores.slot_f1,
                  scores.intent_accuracy, scores.lambda_average);
    std::cout << buf << '\n';
    return;
  }

  if (opt.task == "dialect") {
    auto preds = load_dialect_predictions(opt.preds);
    check_id_sets(gold, preds);

    std::vector<DialectLabel> gold_labels;
    std::vector<DialectLabel> pred_labels;
    for (const auto& inst : gold) {
      if (!inst.dialect)
        throw std::invalid_argument("gold instance '" + inst.instance_id +
                                    "' has no dialect label");
      gold_labels.push_back(*inst.dialect);
      pred_labels.push_back(preds.at(inst.instance_id));
    }

    auto report = per_dialect_report(gold_labels, pred_labels);
    if (!opt.report.empty()) {
      auto out = open_output(opt.report);
      write_report_tsv(out, report);
      if (!out) throw IoError("failed writing '" + opt.report + "'");
    }
    std::snprintf(buf, sizeof(buf), "%.6f", report.weighted_f1);
    std::cout << buf << '\n';
    return;
  }

  throw std::invalid_argument("--task must be 'sid' or 'dialect'");
}

// --- wiring -----------------------------------------------------------------

void add_config_option(CLI::App* sub) {
  sub->add_option("--config", "Line-oriented `key = value` config file");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "Corpus toolkit, baseline trainer and scorer for slot/intent "
      "detection and dialect identification"};
  app.require_subcommand(1);
  // Defaults show up in the resolved-config log.
  app.option_defaults()->always_capture_default(true);

  auto dedup_opt = std::make_shared<DedupOptions>();
  auto* dedup = app.add_subcommand(
      "dedup", "Drop instances whose token text repeats an earlier one");
  dedup->add_option("--in", dedup_opt->in, "Input SID file")->required();
  dedup->add_option("--out", dedup_opt->out, "Output SID file")->required();
  add_config_option(dedup);
  dedup->callback([dedup_opt, dedup] {
    log_resolved_config(*dedup);
    run_dedup(*dedup_opt);
  });

  auto split_opt = std::make_shared<SplitOptions>();
  auto* split_cmd = app.add_subcommand(
      "split", "Contamination-safe train/dev/test split by origin id");
  split_cmd->add_option("--in", split_opt->in, "Input SID file")->required();
  split_cmd->add_option("--out-prefix", split_opt->out_prefix,
                        "Prefix for <prefix>.{train,dev,test}.sid")
      ->required();
  split_cmd->add_option("--ratios", split_opt->ratios,
                        "train,dev,test fractions summing to 1");
  split_cmd->add_option("--seed", split_opt->seed, "Shuffle seed");
  add_config_option(split_cmd);
  split_cmd->callback([split_opt, split_cmd] {
    log_resolved_config(*split_cmd);
    run_split(*split_opt);
  });

  auto augment_opt = std::make_shared<AugmentOptions>();
  auto* augment = app.add_subcommand(
      "augment", "Generate a 4x lexical-mapping silver corpus from Bokmål");
  augment->add_option("--in", augment_opt->in, "Bokmål SID file")->required();
  augment->add_option("--out", augment_opt->out, "Output SID file")
      ->required();
  augment->add_option("--lexicon", augment_opt->lexicon, "Lexicon TSV")
      ->required();
  augment->add_option("--policy", augment_opt->policy,
                      "Variant choice: first|random");
  augment->add_option("--seed", augment_opt->seed,
                      "Seed for --policy random");
  add_config_option(augment);
  augment->callback([augment_opt, augment] {
    log_resolved_config(*augment);
    run_augment(*augment_opt);
  });

  auto annotate_opt = std::make_shared<AnnotateOptions>();
  auto* annotate = app.add_subcommand(
      "annotate", "Silver dialect annotation of transcriptions or tweets");
  annotate->add_option("--in", annotate_opt->in, "Input SID file")->required();
  annotate->add_option("--out", annotate_opt->out, "Output SID file")
      ->required();
  annotate->add_option("--mode", annotate_opt->mode, "semi|auto")->required();
  annotate->add_option("--geo", annotate_opt->geo,
                       "city<TAB>dialect TSV (semi mode)");
  annotate->add_option("--cities", annotate_opt->cities,
                       "id<TAB>city TSV (semi mode)");
  annotate->add_option("--preds", annotate_opt->preds,
                       "id<TAB>dialect<TAB>nordial TSV (auto mode)");
  annotate->add_option("--min-tokens", annotate_opt->min_tokens,
                       "Minimum token count to keep an instance");
  annotate->add_option("--dist", annotate_opt->dist,
                       "Target distribution, e.g. V:0.4545,T:0.2727,...");
  annotate->add_option("--seed", annotate_opt->seed, "Downsampling seed");
  add_config_option(annotate);
  annotate->callback([annotate_opt, annotate] {
    log_resolved_config(*annotate);
    run_annotate(*annotate_opt);
  });

  auto train_opt = std::make_shared<TrainOptions>();
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--task", train_opt->task,
                    "joint|svm|majority|random")
      ->required();
  train->add_option("--in", train_opt->in, "Training SID file")->required();
  train->add_option("--model-out", train_opt->model_out, "Model file path")
      ->required();
  train->add_option("--lambda", train_opt->lambda,
                    "Slot-loss weight (joint)");
  train->add_option("--learning-rate", train_opt->learning_rate,
                    "Learning rate (joint)");
  train->add_option("--epochs", train_opt->epochs,
                    "Epochs; 0 = task default (50 joint, 30 svm)");
  train->add_option("--batch-size", train_opt->batch_size,
                    "Mini-batch size (joint)");
  train->add_option("--weight-decay", train_opt->weight_decay,
                    "L2 weight decay (joint)");
  train->add_option("--svm-reg", train_opt->svm_reg,
                    "Pegasos regularization (svm)");
  train->add_option("--seed", train_opt->seed, "Training seed");
  train->add_option("--dim", train_opt->dimension,
                    "Hashed feature dimension (power of two)");
  train->add_option("--ngram-min", train_opt->ngram_min,
                    "Smallest char n-gram (joint)");
  train->add_option("--ngram-max", train_opt->ngram_max,
                    "Largest char n-gram (joint)");
  train->add_option("--window", train_opt->window,
                    "Token context radius (joint)");
  add_config_option(train);
  train->callback([train_opt, train] {
    log_resolved_config(*train);
    run_train(*train_opt);
  });

  auto predict_opt = std::make_shared<PredictOptions>();
  auto* predict = app.add_subcommand("predict", "Predict with a saved model");
  predict->add_option("--model", predict_opt->model, "Model file")->required();
  predict->add_option("--in", predict_opt->in, "Input SID file")->required();
  predict->add_option("--out", predict_opt->out, "Prediction TSV")->required();
  add_config_option(predict);
  predict->callback([predict_opt, predict] {
    log_resolved_config(*predict);
    run_predict(*predict_opt);
  });

  auto score_opt = std::make_shared<ScoreOptions>();
  auto* score = app.add_subcommand("score", "Score predictions against gold");
  score->add_option("--task", score_opt->task, "sid|dialect")->required();
  score->add_option("--gold", score_opt->gold, "Gold SID file")->required();
  score->add_option("--preds", score_opt->preds, "Prediction TSV")->required();
  score->add_option("--lambda", score_opt->lambda,
                    "Weight of slot F1 in the combined score (sid)");
  score->add_option("--report", score_opt->report, "Per-class report TSV");
  add_config_option(score);
  score->callback([score_opt, score] {
    log_resolved_config(*score);
    run_score(*score_opt);
  });

  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    args = merge_config_args(app, std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(std::move(args));
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace sidkit::cli

#include "sidkit/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace sidkit {

namespace {

double safe_div(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_from(double precision, double recall) {
  double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

struct SpanTotals {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
};

template <typename PerInstance>
SpanTotals count_spans(std::span<const std::vector<SlotTag>> gold,
                       std::span<const std::vector<SlotTag>> pred,
                       PerInstance&& per_instance) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("gold/pred corpus size mismatch");
  SpanTotals totals;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size())
      throw std::invalid_argument("gold/pred length mismatch at instance " +
                                  std::to_string(i));
    auto gold_spans = extract_spans(validate_bio(gold[i]).repaired);
    auto pred_spans = extract_spans(validate_bio(pred[i]).repaired);
    totals.gold += gold_spans.size();
    totals.predicted += pred_spans.size();
    for (const Span& p : pred_spans)
      if (std::find(gold_spans.begin(), gold_spans.end(), p) !=
          gold_spans.end())
        ++totals.correct;
    per_instance(gold_spans, pred_spans);
  }
  return totals;
}

}  // namespace

SpanScores span_f1(std::span<const std::vector<SlotTag>> gold,
                   std::span<const std::vector<SlotTag>> pred) {
  SpanTotals totals = count_spans(gold, pred, [](const auto&, const auto&) {});
  SpanScores scores;
  if (totals.gold == 0 && totals.predicted == 0) {
    scores.precision = scores.recall = scores.f1 = 1.0;
    return scores;
  }
  scores.precision = safe_div(totals.correct, totals.predicted);
  scores.recall = safe_div(totals.correct, totals.gold);
  scores.f1 = f1_from(scores.precision, scores.recall);
  return scores;
}

std::vector<LabeledSpanCounts> span_counts_by_label(
    std::span<const std::vector<SlotTag>> gold,
    std::span<const std::vector<SlotTag>> pred) {
  std::map<std::string, LabeledSpanCounts> by_label;
  count_spans(gold, pred,
              [&](const std::vector<Span>& gold_spans,
                  const std::vector<Span>& pred_spans) {
                for (const Span& g : gold_spans)
                  ++by_label[g.label].gold;
                for (const Span& p : pred_spans) {
                  ++by_label[p.label].predicted;
                  if (std::find(gold_spans.begin(), gold_spans.end(), p) !=
                      gold_spans.end())
                    ++by_label[p.label].correct;
                }
              });
  std::vector<LabeledSpanCounts> out;
  out.reserve(by_label.size());
  for (auto& [label, counts] : by_label) {
    counts.label = label;
    out.push_back(counts);
  }
  return out;
}

double intent_accuracy(std::span<const std::string> gold,
                       std::span<const std::string> pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("gold/pred size mismatch");
  if (gold.empty()) throw std::invalid_argument("empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] == pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

EvalReport weighted_f1_report(std::span<const std::string> gold,
                              std::span<const std::string> pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("gold/pred size mismatch");
  if (gold.empty()) throw std::invalid_argument("empty input");

  std::set<std::string> label_set(gold.begin(), gold.end());
  label_set.insert(pred.begin(), pred.end());

  EvalReport report;
  report.labels.assign(label_set.begin(), label_set.end());
  report.total = gold.size();
  const std::size_t k = report.labels.size();
  report.confusion.assign(k * k, 0);

  auto index_of = [&](const std::string& label) {
    return static_cast<std::size_t>(
        std::lower_bound(report.labels.begin(), report.labels.end(), label) -
        report.labels.begin());
  };
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++report.confusion[index_of(gold[i]) * k + index_of(pred[i])];

  report.per_class.resize(k);
  double weighted_sum = 0.0;
  double macro_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = report.confusion[c * k + c];
    std::size_t gold_count = 0;
    std::size_t pred_count = 0;
    for (std::size_t j = 0; j < k; ++j) {
      gold_count += report.confusion[c * k + j];
      pred_count += report.confusion[j * k + c];
    }
    ClassMetrics& m = report.per_class[c];
    m.support = gold_count;
    m.precision = safe_div(tp, pred_count);
    m.recall = safe_div(tp, gold_count);
    m.f1 = f1_from(m.precision, m.recall);
    weighted_sum += m.f1 * static_cast<double>(m.support);
    macro_sum += m.f1;
  }
  report.weighted_f1 = weighted_sum / static_cast<double>(report.total);
  report.macro_f1 = macro_sum / static_cast<double>(k);
  return report;
}

EvalReport per_dialect_report(std::span<const DialectLabel> gold,
                              std::span<const DialectLabel> pred) {
  std::vector<std::string> gold_codes;
  std::vector<std::string> pred_codes;
  gold_codes.reserve(gold.size());
  pred_codes.reserve(pred.size());
  for (DialectLabel d : gold) gold_codes.emplace_back(1, dialect_code(d));
  for (DialectLabel d : pred) pred_codes.emplace_back(1, dialect_code(d));
  return weighted_f1_report(gold_codes, pred_codes);
}

double lambda_average(double slot_f1, double intent_accuracy, double lambda) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(slot_f1) || !in_unit(intent_accuracy) || !in_unit(lambda))
    throw std::invalid_argument("lambda_average inputs must be in [0, 1]");
  return lambda * slot_f1 + (1.0 - lambda) * intent_accuracy;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-16s %9s %9s %9s %9s\n", "label",
                "precision", "recall", "f1", "support");
  out += buf;
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    std::snprintf(buf, sizeof(buf), "%-16s %9.4f %9.4f %9.4f %9zu\n",
                  report.labels[c].c_str(), m.precision, m.recall, m.f1,
                  m.support);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-16s %9.4f\n", "weighted_f1",
                report.weighted_f1);
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-16s %9.4f\n", "macro_f1",
                report.macro_f1);
  out += buf;
  return out;
}

void write_report_tsv(std::ostream& out, const EvalReport& report) {
  out << "label\tprecision\trecall\tf1\tsupport\n";
  char buf[64];
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f", m.precision, m.recall,
                  m.f1);
    out << report.labels[c] << '\t' << buf << '\t' << m.support << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.6f", report.weighted_f1);
  out << "weighted_f1\t" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.6f", report.macro_f1);
  out << "macro_f1\t" << buf << "\n";
}

}  // namespace sidkit

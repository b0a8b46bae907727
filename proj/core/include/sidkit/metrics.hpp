#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sidkit/corpus.hpp"

namespace sidkit {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

// Per-class precision/recall/F1 with confusion matrix. weighted_f1 is the
// support-weighted mean of per-class F1; label order is the sorted union
// of gold and predicted labels. Empty denominators score 0.
struct EvalReport {
  std::vector<std::string> labels;
  std::vector<ClassMetrics> per_class;
  std::vector<std::size_t> confusion;  // row-major, row = gold, col = pred
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  std::size_t total = 0;

  std::size_t confusion_at(std::size_t gold, std::size_t pred) const {
    return confusion[gold * labels.size() + pred];
  }
};

struct SpanScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact-match span F1, micro-averaged over the corpus: a predicted span is
// correct iff gold contains the identical (label, start, end) span in the
// same instance. Sequences are BIO-repaired before extraction. A corpus
// with no gold and no predicted spans scores 1 by convention; otherwise
// empty denominators score 0.
SpanScores span_f1(std::span<const std::vector<SlotTag>> gold,
                   std::span<const std::vector<SlotTag>> pred);

// Per-slot-type breakdown of the same counts, for reports.
struct LabeledSpanCounts {
  std::string label;
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
};
std::vector<LabeledSpanCounts> span_counts_by_label(
    std::span<const std::vector<SlotTag>> gold,
    std::span<const std::vector<SlotTag>> pred);

// Fraction of exact matches; empty input is an error.
double intent_accuracy(std::span<const std::string> gold,
                       std::span<const std::string> pred);

EvalReport weighted_f1_report(std::span<const std::string> gold,
                              std::span<const std::string> pred);

// Dialect flavor of the same report, keyed by the single-letter codes.
EvalReport per_dialect_report(std::span<const DialectLabel> gold,
                              std::span<const DialectLabel> pred);

// lambda * slot_f1 + (1 - lambda) * intent_accuracy; all inputs in [0, 1].
double lambda_average(double slot_f1, double intent_accuracy, double lambda);

struct SidScores {
  double slot_f1 = 0.0;
  double intent_accuracy = 0.0;
  double lambda_average = 0.0;
};

std::string format_report(const EvalReport& report);
void write_report_tsv(std::ostream& out, const EvalReport& report);

}  // namespace sidkit

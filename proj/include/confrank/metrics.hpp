#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace confrank {

// Per-evaluation report. Means and margins live on the probability scale
// (sigmoid of the logit); AUC and the model-vs-model ranking scores are
// computed on logits directly since both are order statistics.
// Fields without a defined value (single-class data, no teacher) stay unset.
struct MetricReport {
  size_t n = 0;
  size_t n_pos = 0;
  size_t n_neg = 0;
  std::optional<double> auc;
  std::optional<double> accuracy;
  std::optional<double> pos_mean;
  std::optional<double> neg_mean;
  std::optional<double> sample_margin;
  std::optional<double> c_acc;
  std::optional<double> c_auc;

  // Single-line JSON with fixed key order; absent optionals are emitted as
  // null except c_acc/c_auc, which are omitted when no teacher was given.
  nlohmann::ordered_json to_json() const;
  std::string to_json_line() const;
};

// Fraction of (positive, negative) pairs ranked correctly, ties counted 1/2.
// Rank-statistic implementation, O(N log N); exactly equals the indicator
// double loop. Throws on single-class input.
double auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

// Exact-match rate after thresholding sigmoid(logit); a probability exactly
// at the threshold classifies positive.
double accuracy(const std::vector<double>& logits,
                const std::vector<uint8_t>& labels, double threshold = 0.5);

struct MarginDiagnostics {
  std::optional<double> pos_mean;
  std::optional<double> neg_mean;
  std::optional<double> sample_margin;
};

MarginDiagnostics margin_diagnostics(const std::vector<double>& logits,
                                     const std::vector<uint8_t>& labels);

// C_acc: fraction of examples whose signed-label margin strictly beats the
// teacher's, labels read as {-1,+1}; ties count 0.
double ranking_score_acc(const std::vector<double>& student_logits,
                         const std::vector<double>& teacher_logits,
                         const std::vector<uint8_t>& labels);

// C_auc: fraction of (positive, negative) pairs where the student's
// pair-distance strictly exceeds the teacher's; ties count 0. Quadratic in
// the class sizes.
double ranking_score_auc(const std::vector<double>& student_logits,
                         const std::vector<double>& teacher_logits,
                         const std::vector<uint8_t>& labels);

MetricReport compute_report(const std::vector<double>& logits,
                            const std::vector<uint8_t>& labels);

// As above plus C_acc / C_auc against aligned teacher logits.
MetricReport compute_report(const std::vector<double>& logits,
                            const std::vector<double>& teacher_logits,
                            const std::vector<uint8_t>& labels);

}  // namespace confrank

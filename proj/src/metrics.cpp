#include "confrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confrank/error.hpp"
#include "confrank/losses.hpp"

namespace confrank {

namespace {

std::pair<size_t, size_t> class_counts(const std::vector<uint8_t>& labels) {
  size_t pos = 0;
  for (uint8_t y : labels) pos += y ? 1 : 0;
  return {pos, labels.size() - pos};
}

void check_aligned(size_t a, size_t b, const char* what) {
  if (a != b)
    throw DataError(std::string(what) + ": got " + std::to_string(a) + " vs " +
                    std::to_string(b));
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
  check_aligned(scores.size(), labels.size(), "misaligned scores/labels");
  auto [n_pos, n_neg] = class_counts(labels);
  if (n_pos == 0 || n_neg == 0)
    throw DataError("auc undefined: need both classes, got " +
                    std::to_string(n_pos) + " positives and " +
                    std::to_string(n_neg) + " negatives");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney with average ranks over tie groups (ties count 1/2).
  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t k = i; k < j; ++k)
      if (labels[order[k]]) pos_rank_sum += avg_rank;
    i = j;
  }
  double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double accuracy(const std::vector<double>& logits,
                const std::vector<uint8_t>& labels, double threshold) {
  check_aligned(logits.size(), labels.size(), "misaligned logits/labels");
  if (logits.empty()) throw DataError("accuracy undefined on empty input");
  size_t correct = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    uint8_t pred = sigmoid(logits[i]) >= threshold ? 1 : 0;
    correct += pred == labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.size());
}

MarginDiagnostics margin_diagnostics(const std::vector<double>& logits,
                                     const std::vector<uint8_t>& labels) {
  check_aligned(logits.size(), labels.size(), "misaligned logits/labels");
  double pos_sum = 0.0, neg_sum = 0.0;
  auto [n_pos, n_neg] = class_counts(labels);
  for (size_t i = 0; i < logits.size(); ++i) {
    double p = sigmoid(logits[i]);
    if (labels[i]) pos_sum += p;
    else neg_sum += p;
  }
  MarginDiagnostics d;
  if (n_pos > 0) d.pos_mean = pos_sum / static_cast<double>(n_pos);
  if (n_neg > 0) d.neg_mean = neg_sum / static_cast<double>(n_neg);
  if (d.pos_mean && d.neg_mean) d.sample_margin = *d.pos_mean - *d.neg_mean;
  return d;
}

double ranking_score_acc(const std::vector<double>& student_logits,
                         const std::vector<double>& teacher_logits,
                         const std::vector<uint8_t>& labels) {
  check_aligned(student_logits.size(), teacher_logits.size(),
                "misaligned student/teacher logits");
  check_aligned(student_logits.size(), labels.size(), "misaligned logits/labels");
  if (labels.empty()) throw DataError("ranking score undefined on empty input");
  size_t wins = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    double sign = labels[i] ? 1.0 : -1.0;
    wins += sign * student_logits[i] > sign * teacher_logits[i] ? 1 : 0;
  }
  return static_cast<double>(wins) / static_cast<double>(labels.size());
}

double ranking_score_auc(const std::vector<double>& student_logits,
                         const std::vector<double>& teacher_logits,
                         const std::vector<uint8_t>& labels) {
  check_aligned(student_logits.size(), teacher_logits.size(),
                "misaligned student/teacher logits");
  check_aligned(student_logits.size(), labels.size(), "misaligned logits/labels");
  std::vector<size_t> pos, neg;
  for (size_t i = 0; i < labels.size(); ++i)
    (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw DataError("ranking_score_auc undefined: need both classes");

  size_t wins = 0;
  for (size_t i : pos) {
    double sd_i = student_logits[i], td_i = teacher_logits[i];
    for (size_t j : neg)
      wins += (sd_i - student_logits[j]) > (td_i - teacher_logits[j]) ? 1 : 0;
  }
  return static_cast<double>(wins) /
         (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

MetricReport compute_report(const std::vector<double>& logits,
                            const std::vector<uint8_t>& labels) {
  check_aligned(logits.size(), labels.size(), "misaligned logits/labels");
  MetricReport r;
  r.n = logits.size();
  auto [n_pos, n_neg] = class_counts(labels);
  r.n_pos = n_pos;
  r.n_neg = n_neg;
  if (r.n == 0) return r;
  r.accuracy = accuracy(logits, labels);
  MarginDiagnostics d = margin_diagnostics(logits, labels);
  r.pos_mean = d.pos_mean;
  r.neg_mean = d.neg_mean;
  r.sample_margin = d.sample_margin;
  if (n_pos > 0 && n_neg > 0) r.auc = auc(logits, labels);
  return r;
}

MetricReport compute_report(const std::vector<double>& logits,
                            const std::vector<double>& teacher_logits,
                            const std::vector<uint8_t>& labels) {
  MetricReport r = compute_report(logits, labels);
  if (r.n > 0) r.c_acc = ranking_score_acc(logits, teacher_logits, labels);
  if (r.n_pos > 0 && r.n_neg > 0)
    r.c_auc = ranking_score_auc(logits, teacher_logits, labels);
  return r;
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

nlohmann::ordered_json MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["n_pos"] = n_pos;
  j["n_neg"] = n_neg;
  j["auc"] = opt_json(auc);
  j["accuracy"] = opt_json(accuracy);
  j["pos_mean"] = opt_json(pos_mean);
  j["neg_mean"] = opt_json(neg_mean);
  j["sample_margin"] = opt_json(sample_margin);
  if (c_acc) j["c_acc"] = *c_acc;
  if (c_auc) j["c_auc"] = *c_auc;
  return j;
}

std::string MetricReport::to_json_line() const { return to_json().dump(); }

}  // namespace confrank

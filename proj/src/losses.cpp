#include "confrank/losses.hpp"

#include <cmath>

#include "confrank/error.hpp"

namespace confrank {

Scoring parse_scoring(const std::string& name) {
  if (name == "logistic") return Scoring::kLogistic;
  if (name == "square") return Scoring::kSquare;
  throw UsageError("unknown scoring function: " + name +
                   " (expected logistic|square)");
}

std::string scoring_name(Scoring phi) {
  return phi == Scoring::kLogistic ? "logistic" : "square";
}

double softplus(double x) {
  return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

void BatchLogits::validate(bool need_teacher) const {
  if (labels.size() != student.size())
    throw DataError("batch has " + std::to_string(student.size()) +
                    " logits but " + std::to_string(labels.size()) + " labels");
  if (need_teacher) {
    if (teacher.size() != student.size())
      throw DataError("batch has " + std::to_string(student.size()) +
                      " student logits but " + std::to_string(teacher.size()) +
                      " teacher logits");
    for (size_t i = 0; i < teacher.size(); ++i) {
      if (!std::isfinite(teacher[i])) {
        std::string which = i < ids.size() ? "example " + std::to_string(ids[i])
                                           : "batch position " + std::to_string(i);
        throw DataError("missing or non-finite teacher logit for " + which);
      }
    }
  }
}

namespace {

// phi and dphi/dm for the label-directed margin.
inline double phi_value(Scoring phi, double m) {
  return phi == Scoring::kLogistic ? softplus(-m) : (1.0 - m) * (1.0 - m);
}

inline double phi_deriv(Scoring phi, double m) {
  return phi == Scoring::kLogistic ? -sigmoid(-m) : -2.0 * (1.0 - m);
}

}  // namespace

LossResult ce_loss(const BatchLogits& batch) {
  batch.validate(false);
  const size_t n = batch.size();
  if (n == 0) throw DataError("ce_loss on an empty batch");

  LossResult r;
  r.dloss_du.resize(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double u = batch.student[i];
    double y = batch.labels[i];
    acc += y > 0.0 ? softplus(-u) : softplus(u);
    r.dloss_du[i] = (sigmoid(u) - y) / static_cast<double>(n);
  }
  r.loss = acc / static_cast<double>(n);
  return r;
}

LossResult cr_loss(const BatchLogits& batch, Scoring phi) {
  batch.validate(true);
  const size_t n = batch.size();
  if (n == 0) throw DataError("cr_loss on an empty batch");

  LossResult r;
  r.dloss_du.resize(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double m = batch.student[i] - batch.teacher[i];
    if (batch.labels[i]) {
      acc += phi_value(phi, m);
      r.dloss_du[i] = phi_deriv(phi, m) / static_cast<double>(n);
    } else {
      acc += phi_value(phi, -m);
      r.dloss_du[i] = -phi_deriv(phi, -m) / static_cast<double>(n);
    }
  }
  r.loss = acc / static_cast<double>(n);
  return r;
}

LossResult rcr_loss(const BatchLogits& batch, Scoring phi) {
  batch.validate(true);
  const size_t n = batch.size();

  LossResult r;
  r.dloss_du.assign(n, 0.0);

  std::vector<size_t> pos, neg;
  for (size_t i = 0; i < n; ++i) (batch.labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) return r;

  const double scale = 1.0 / (static_cast<double>(pos.size()) * neg.size());
  double acc = 0.0;
  for (size_t i : pos) {
    double du_i = batch.student[i] - batch.teacher[i];
    for (size_t j : neg) {
      // Student pair-distance minus teacher pair-distance.
      double m = du_i - (batch.student[j] - batch.teacher[j]);
      acc += phi_value(phi, m);
      double d = phi_deriv(phi, m) * scale;
      r.dloss_du[i] += d;
      r.dloss_du[j] -= d;
    }
  }
  r.loss = acc * scale;
  return r;
}

LossResult kd_loss(const BatchLogits& batch, double temperature) {
  batch.validate(true);
  const size_t n = batch.size();
  if (n == 0) throw DataError("kd_loss on an empty batch");
  if (!(temperature > 0.0)) throw DataError("kd temperature must be positive");

  const double t = temperature;
  LossResult r;
  r.dloss_du.resize(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double us = batch.student[i] / t;
    double target = sigmoid(batch.teacher[i] / t);
    // T^2 * BCE(sigmoid(v/T), sigmoid(u/T)) in softplus form.
    acc += t * t * (softplus(us) - target * us);
    r.dloss_du[i] = t * (sigmoid(us) - target) / static_cast<double>(n);
  }
  r.loss = acc / static_cast<double>(n);
  return r;
}

LossResult rkd_logit_loss(const BatchLogits& batch) {
  batch.validate(true);
  const size_t n = batch.size();

  LossResult r;
  r.dloss_du.assign(n, 0.0);
  if (n < 2) return r;

  const double scale = 1.0 / (static_cast<double>(n) * (n - 1));
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double e = (batch.student[i] - batch.student[j]) -
                 (batch.teacher[i] - batch.teacher[j]);
      acc += 0.5 * e * e;
      r.dloss_du[i] += e * scale;
      r.dloss_du[j] -= e * scale;
    }
  }
  r.loss = acc * scale;
  return r;
}

LossResult combined_loss(const BatchLogits& batch, const LossWeights& weights,
                         Scoring phi) {
  if (!std::isfinite(weights.lambda_cr) || !std::isfinite(weights.lambda_rcr) ||
      weights.lambda_cr < 0.0 || weights.lambda_rcr < 0.0)
    throw DataError("loss weights must be finite and non-negative");

  LossResult r = ce_loss(batch);
  if (weights.lambda_cr > 0.0) {
    LossResult cr = cr_loss(batch, phi);
    r.loss += weights.lambda_cr * cr.loss;
    for (size_t i = 0; i < r.dloss_du.size(); ++i)
      r.dloss_du[i] += weights.lambda_cr * cr.dloss_du[i];
  }
  if (weights.lambda_rcr > 0.0) {
    LossResult rcr = rcr_loss(batch, phi);
    r.loss += weights.lambda_rcr * rcr.loss;
    for (size_t i = 0; i < r.dloss_du.size(); ++i)
      r.dloss_du[i] += weights.lambda_rcr * rcr.dloss_du[i];
  }
  return r;
}

}  // namespace confrank

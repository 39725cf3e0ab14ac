#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace confrank {

// Convex margin scoring functions for the confidence-ranking losses:
//   logistic: phi(m) = log(1 + exp(-m))
//   square:   phi(m) = (1 - m)^2
enum class Scoring { kLogistic, kSquare };

Scoring parse_scoring(const std::string& name);
std::string scoring_name(Scoring phi);

struct LossWeights {
  double lambda_cr = 0.0;
  double lambda_rcr = 0.0;
};

// A mini-batch of aligned student logits u, teacher logits v and labels.
// Teacher logits are a constant input; no loss here ever produces gradient
// with respect to them. ids are optional and only used in error messages.
struct BatchLogits {
  std::vector<double> student;
  std::vector<double> teacher;
  std::vector<uint8_t> labels;
  std::vector<uint64_t> ids;

  size_t size() const { return student.size(); }
  void validate(bool need_teacher) const;
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> dloss_du;
};

// log(1 + exp(x)) as max(x,0) + log1p(exp(-|x|)).
double softplus(double x);
double sigmoid(double x);

// Mean binary cross-entropy over logits; gradient (sigmoid(u) - y) / n.
LossResult ce_loss(const BatchLogits& batch);

// Point-wise confidence ranking on the label-directed margin u - v:
// mean of y*phi(u-v) + (1-y)*phi(-(u-v)).
LossResult cr_loss(const BatchLogits& batch, Scoring phi);

// Relational confidence ranking over all in-batch (positive, negative)
// pairs: mean of phi((u+ - u-) - (v+ - v-)). A batch without both classes
// contributes zero loss and zero gradient.
LossResult rcr_loss(const BatchLogits& batch, Scoring phi);

// Distillation on temperature-scaled probabilities, scaled by T^2; meant to
// be mixed with ce_loss externally.
LossResult kd_loss(const BatchLogits& batch, double temperature);

// Logit-based relational distillation: mean over ordered pairs i != j of
// 1/2 ((u_i - u_j) - (v_i - v_j))^2. Batches smaller than 2 contribute zero.
LossResult rkd_logit_loss(const BatchLogits& batch);

// ce + lambda_cr * cr + lambda_rcr * rcr. A zero weight skips its term
// entirely, so (0, 0) reproduces ce_loss bit-exactly.
LossResult combined_loss(const BatchLogits& batch, const LossWeights& weights,
                         Scoring phi);

}  // namespace confrank

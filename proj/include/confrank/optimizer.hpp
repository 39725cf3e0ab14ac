#pragma once

#include <vector>

#include "confrank/model.hpp"

namespace confrank {

// Adagrad: w <- w - lr * g / (sqrt(G) + eps), G accumulating squared
// gradients. Accumulator kept in double, one slot per parameter.
struct AdagradState {
  double learning_rate = 0.05;
  double epsilon = 1e-8;
  std::vector<double> accum;

  void init(size_t param_count) { accum.assign(param_count, 0.0); }
};

// Produces a new snapshot at version+1; the input snapshot is not modified.
// Only offsets touched by the buffer are visited (a zero gradient leaves a
// weight and its accumulator unchanged, so skipping untouched slots is exact).
ModelSnapshot apply_update(const ModelSnapshot& snapshot,
                           const GradientBuffer& grads, AdagradState& state);

}  // namespace confrank

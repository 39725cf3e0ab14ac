#include "confrank/optimizer.hpp"

#include <cmath>

#include "confrank/error.hpp"

namespace confrank {

ModelSnapshot apply_update(const ModelSnapshot& snapshot,
                           const GradientBuffer& grads, AdagradState& state) {
  if (grads.grads.size() != snapshot.params.size())
    throw DataError("gradient buffer size does not match parameter count");
  if (state.accum.size() != snapshot.params.size())
    throw DataError("optimizer state size does not match parameter count");

  ModelSnapshot next = snapshot;
  next.version = snapshot.version + 1;
  for (size_t off : grads.touched) {
    double g = grads.grads[off];
    if (!std::isfinite(g))
      throw NumericError("non-finite gradient at parameter offset " +
                         std::to_string(off));
    state.accum[off] += g * g;
    double step = state.learning_rate * g / (std::sqrt(state.accum[off]) + state.epsilon);
    next.params[off] = static_cast<float>(static_cast<double>(next.params[off]) - step);
  }
  return next;
}

}  // namespace confrank

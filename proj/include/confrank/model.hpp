#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confrank/data.hpp"

namespace confrank {

enum class ArchKind { kLR, kFM, kDeepFM };

std::string arch_kind_name(ArchKind kind);
ArchKind parse_arch_kind(const std::string& name);

// Flat parameter layout, fixed order (F = field_count, D = hash_dim,
// K = embedding_dim, H = hidden_units):
//
//   [0]                          bias
//   [1, 1+F*D)                   linear weights w[f][i]
//   FM / DeepFM:
//   [emb, emb+F*D*K)             embeddings v[f][i][k], k fastest
//   DeepFM only:
//   [mlp, mlp+H*F*K)             W1[h][j], j over the F*K concat inputs
//   [.., +H)                     b1[h]
//   [.., +H)                     W2[h]
//   [.., +1)                     b2
struct ArchDescriptor {
  ArchKind kind = ArchKind::kLR;
  uint32_t field_count = 0;
  uint32_t hash_dim = 0;
  uint32_t embedding_dim = 0;
  uint32_t hidden_units = 0;

  void validate() const;
  size_t param_count() const;
  size_t linear_offset() const { return 1; }
  size_t embedding_offset() const {
    return 1 + static_cast<size_t>(field_count) * hash_dim;
  }
  size_t mlp_offset() const {
    return embedding_offset() +
           static_cast<size_t>(field_count) * hash_dim * embedding_dim;
  }
  bool operator==(const ArchDescriptor&) const = default;
};

// Immutable versioned parameter set. Updates produce a new snapshot.
struct ModelSnapshot {
  ArchDescriptor arch;
  uint64_t version = 0;
  uint64_t rng_seed = 0;
  std::vector<float> params;
};

// Dense accumulator with first-touch tracking so sparse updates only visit
// offsets that actually received gradient.
struct GradientBuffer {
  std::vector<double> grads;
  std::vector<size_t> touched;
  int accumulated = 0;

  void reset(size_t param_count);
  void add(size_t offset, double g) {
    if (stamp_[offset] != epoch_) {
      stamp_[offset] = epoch_;
      touched.push_back(offset);
      grads[offset] = g;
    } else {
      grads[offset] += g;
    }
  }

 private:
  std::vector<uint32_t> stamp_;
  uint32_t epoch_ = 0;
};

// Bias and linear weights start at zero; embeddings and MLP weights are
// uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)). MLP biases start
// at zero. Deterministic per seed.
ModelSnapshot init_snapshot(const ArchDescriptor& arch, uint64_t seed);

// Logit z = h(x; theta). Accumulates in double.
double forward(const ModelSnapshot& snapshot, const Example& example);

// Accumulates upstream * dlogit/dparam into the buffer (exact analytic
// gradient; only touched offsets are written).
void backward(const ModelSnapshot& snapshot, const Example& example,
              double upstream, GradientBuffer& buffer);

}  // namespace confrank

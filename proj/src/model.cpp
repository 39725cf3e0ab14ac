#include "confrank/model.hpp"

#include <cmath>

#include "confrank/error.hpp"
#include "confrank/rng.hpp"

namespace confrank {

std::string arch_kind_name(ArchKind kind) {
  switch (kind) {
    case ArchKind::kLR: return "lr";
    case ArchKind::kFM: return "fm";
    case ArchKind::kDeepFM: return "deepfm";
  }
  return "?";
}

ArchKind parse_arch_kind(const std::string& name) {
  if (name == "lr") return ArchKind::kLR;
  if (name == "fm") return ArchKind::kFM;
  if (name == "deepfm") return ArchKind::kDeepFM;
  throw UsageError("unknown architecture: " + name + " (expected lr|fm|deepfm)");
}

void ArchDescriptor::validate() const {
  if (field_count == 0) throw DataError("field_count must be positive");
  if (hash_dim < 2) throw DataError("hash_dim must be >= 2");
  if (kind != ArchKind::kLR && embedding_dim == 0)
    throw DataError("embedding_dim must be positive for fm/deepfm");
  if (kind == ArchKind::kDeepFM && hidden_units == 0)
    throw DataError("hidden_units must be positive for deepfm");
}

size_t ArchDescriptor::param_count() const {
  size_t n = 1 + static_cast<size_t>(field_count) * hash_dim;
  if (kind == ArchKind::kLR) return n;
  n += static_cast<size_t>(field_count) * hash_dim * embedding_dim;
  if (kind == ArchKind::kFM) return n;
  size_t mlp_in = static_cast<size_t>(field_count) * embedding_dim;
  n += static_cast<size_t>(hidden_units) * mlp_in;  // W1
  n += hidden_units;                                // b1
  n += hidden_units;                                // W2
  n += 1;                                           // b2
  return n;
}

void GradientBuffer::reset(size_t param_count) {
  if (grads.size() != param_count) {
    grads.assign(param_count, 0.0);
    stamp_.assign(param_count, 0);
    epoch_ = 0;
  }
  ++epoch_;
  if (epoch_ == 0) {  // stamp wrap
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  touched.clear();
  accumulated = 0;
}

ModelSnapshot init_snapshot(const ArchDescriptor& arch, uint64_t seed) {
  arch.validate();
  ModelSnapshot s;
  s.arch = arch;
  s.version = 0;
  s.rng_seed = seed;
  s.params.assign(arch.param_count(), 0.0f);

  if (arch.kind == ArchKind::kLR) return s;

  Rng rng(splitmix64(seed));
  const size_t emb = arch.embedding_offset();
  const size_t emb_n =
      static_cast<size_t>(arch.field_count) * arch.hash_dim * arch.embedding_dim;
  // Embedding table viewed as a hash_dim -> embedding_dim map per field.
  const double emb_a =
      std::sqrt(6.0 / (static_cast<double>(arch.hash_dim) + arch.embedding_dim));
  for (size_t i = 0; i < emb_n; ++i)
    s.params[emb + i] = static_cast<float>(rng.next_uniform_sym(emb_a));

  if (arch.kind == ArchKind::kFM) return s;

  const size_t mlp_in = static_cast<size_t>(arch.field_count) * arch.embedding_dim;
  const size_t h = arch.hidden_units;
  size_t off = arch.mlp_offset();
  const double w1_a = std::sqrt(6.0 / (static_cast<double>(mlp_in) + h));
  for (size_t i = 0; i < h * mlp_in; ++i)
    s.params[off + i] = static_cast<float>(rng.next_uniform_sym(w1_a));
  off += h * mlp_in;
  off += h;  // b1 stays zero
  const double w2_a = std::sqrt(6.0 / (static_cast<double>(h) + 1.0));
  for (size_t i = 0; i < h; ++i)
    s.params[off + i] = static_cast<float>(rng.next_uniform_sym(w2_a));
  // b2 stays zero
  return s;
}

namespace {

void check_example(const ModelSnapshot& s, const Example& ex) {
  const auto& arch = s.arch;
  if (ex.indices.size() != arch.field_count)
    throw DataError("example " + std::to_string(ex.id) + " has " +
                    std::to_string(ex.indices.size()) + " indices, model expects " +
                    std::to_string(arch.field_count));
  for (uint32_t f = 0; f < arch.field_count; ++f)
    if (ex.indices[f] >= arch.hash_dim)
      throw DataError("example " + std::to_string(ex.id) + " field " +
                      std::to_string(f) + " index " +
                      std::to_string(ex.indices[f]) + " out of range [0, " +
                      std::to_string(arch.hash_dim) + ")");
}

// Scratch for DeepFM forward/backward recomputation.
struct MlpScratch {
  std::vector<double> x;    // concat embeddings, F*K
  std::vector<double> pre;  // hidden pre-activations, H
};

double mlp_forward(const ModelSnapshot& s, const Example& ex, MlpScratch& m) {
  const auto& arch = s.arch;
  const size_t k = arch.embedding_dim;
  const size_t mlp_in = static_cast<size_t>(arch.field_count) * k;
  const size_t h = arch.hidden_units;
  const float* p = s.params.data();
  const size_t emb = arch.embedding_offset();

  m.x.resize(mlp_in);
  for (uint32_t f = 0; f < arch.field_count; ++f) {
    const float* v = p + emb + (static_cast<size_t>(f) * arch.hash_dim +
                                ex.indices[f]) * k;
    for (size_t j = 0; j < k; ++j) m.x[f * k + j] = v[j];
  }

  const size_t w1 = arch.mlp_offset();
  const size_t b1 = w1 + h * mlp_in;
  const size_t w2 = b1 + h;
  const size_t b2 = w2 + h;

  m.pre.resize(h);
  double out = p[b2];
  for (size_t i = 0; i < h; ++i) {
    double acc = p[b1 + i];
    const float* row = p + w1 + i * mlp_in;
    for (size_t j = 0; j < mlp_in; ++j) acc += static_cast<double>(row[j]) * m.x[j];
    m.pre[i] = acc;
    if (acc > 0.0) out += static_cast<double>(p[w2 + i]) * acc;
  }
  return out;
}

}  // namespace

double forward(const ModelSnapshot& s, const Example& ex) {
  check_example(s, ex);
  const auto& arch = s.arch;
  const float* p = s.params.data();

  double logit = p[0];
  for (uint32_t f = 0; f < arch.field_count; ++f)
    logit += p[1 + static_cast<size_t>(f) * arch.hash_dim + ex.indices[f]];
  if (arch.kind == ArchKind::kLR) return logit;

  // FM pairwise term per factor: 1/2 [(sum_i v_ik)^2 - sum_i v_ik^2].
  const size_t k = arch.embedding_dim;
  const size_t emb = arch.embedding_offset();
  double inter = 0.0;
  for (size_t j = 0; j < k; ++j) {
    double sum = 0.0, sum_sq = 0.0;
    for (uint32_t f = 0; f < arch.field_count; ++f) {
      double v = p[emb + (static_cast<size_t>(f) * arch.hash_dim +
                          ex.indices[f]) * k + j];
      sum += v;
      sum_sq += v * v;
    }
    inter += sum * sum - sum_sq;
  }
  logit += 0.5 * inter;
  if (arch.kind == ArchKind::kFM) return logit;

  MlpScratch m;
  return logit + mlp_forward(s, ex, m);
}

void backward(const ModelSnapshot& s, const Example& ex, double upstream,
              GradientBuffer& buf) {
  check_example(s, ex);
  buf.accumulated += 1;
  if (upstream == 0.0) return;

  const auto& arch = s.arch;
  const float* p = s.params.data();

  buf.add(0, upstream);
  for (uint32_t f = 0; f < arch.field_count; ++f)
    buf.add(1 + static_cast<size_t>(f) * arch.hash_dim + ex.indices[f], upstream);
  if (arch.kind == ArchKind::kLR) return;

  const size_t k = arch.embedding_dim;
  const size_t emb = arch.embedding_offset();

  // d(FM)/dv[f][k] = sum_k - v[f][k].
  std::vector<double> col_sum(k, 0.0);
  for (size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (uint32_t f = 0; f < arch.field_count; ++f)
      sum += p[emb + (static_cast<size_t>(f) * arch.hash_dim + ex.indices[f]) * k + j];
    col_sum[j] = sum;
  }
  for (uint32_t f = 0; f < arch.field_count; ++f) {
    size_t base = emb + (static_cast<size_t>(f) * arch.hash_dim + ex.indices[f]) * k;
    for (size_t j = 0; j < k; ++j) {
      double v = p[base + j];
      buf.add(base + j, upstream * (col_sum[j] - v));
    }
  }
  if (arch.kind == ArchKind::kFM) return;

  MlpScratch m;
  mlp_forward(s, ex, m);
  const size_t mlp_in = static_cast<size_t>(arch.field_count) * k;
  const size_t h = arch.hidden_units;
  const size_t w1 = arch.mlp_offset();
  const size_t b1 = w1 + h * mlp_in;
  const size_t w2 = b1 + h;
  const size_t b2 = w2 + h;

  buf.add(b2, upstream);
  std::vector<double> dx(mlp_in, 0.0);
  for (size_t i = 0; i < h; ++i) {
    double act = m.pre[i] > 0.0 ? m.pre[i] : 0.0;
    buf.add(w2 + i, upstream * act);
    if (m.pre[i] <= 0.0) continue;
    double dh = upstream * static_cast<double>(p[w2 + i]);
    buf.add(b1 + i, dh);
    const float* row = p + w1 + i * mlp_in;
    for (size_t j = 0; j < mlp_in; ++j) {
      buf.add(w1 + i * mlp_in + j, dh * m.x[j]);
      dx[j] += dh * static_cast<double>(row[j]);
    }
  }
  // Embeddings feed both the FM term and the MLP input.
  for (uint32_t f = 0; f < arch.field_count; ++f) {
    size_t base = emb + (static_cast<size_t>(f) * arch.hash_dim + ex.indices[f]) * k;
    for (size_t j = 0; j < k; ++j) buf.add(base + j, dx[f * k + j]);
  }
}

}  // namespace confrank

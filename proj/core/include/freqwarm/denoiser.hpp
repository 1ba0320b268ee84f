#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace freqwarm::flow {

inline constexpr std::size_t kTimeFrequencies = 8;
inline constexpr std::size_t kTimeEmbeddingDim = 2 * kTimeFrequencies;

/// [sin(w_k t), cos(w_k t)] for w_k = 2^k, k = 0..7.
void time_embedding(double t, std::span<double> out);

/// Default hidden width: 4 d capped at 2048, where d is the network input size.
std::size_t default_hidden_width(std::size_t data_dim);

/// MLP velocity field: [z_t, emb(t)] -> tanh -> tanh -> linear -> v.
/// Parameters live in one flat vector; layer l stores its weights input-major
/// (in x out) followed by its out biases.
struct DenoiserParams {
  std::vector<std::size_t> widths;  // {d + 16, hidden, hidden, d}
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t data_dim() const { return widths.back(); }
  std::size_t layer_count() const { return widths.size() - 1; }
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
  friend bool operator==(const DenoiserParams&, const DenoiserParams&) = default;
};

/// hidden_width == 0 selects default_hidden_width.
DenoiserParams make_denoiser(std::size_t data_dim, std::size_t hidden_width, std::uint64_t seed);

/// Same layer shapes as `shape`, every entry zero.
DenoiserParams zeros_like(const DenoiserParams& shape);

void validate(const DenoiserParams& p);

/// Row-major batch of n samples, each `dim` wide.
struct Batch {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
};

/// Single sample v = net(z_t, t).
void forward_one(const DenoiserParams& p, std::span<const double> zt, double t,
                 std::span<double> out);
/// Applies forward_one to each sample in turn; no cross-sample coupling.
Batch forward(const DenoiserParams& p, const Batch& zt, std::span<const double> t);

/// Rectified-flow training batch: zt = (1 - t) z0 + t z1, v_target = z1 - z0.
struct FlowBatch {
  Batch z0;
  Batch z1;
  std::vector<double> t;
  Batch zt;
  Batch v_target;
};

FlowBatch make_flow_batch(Batch z0, Batch z1, std::vector<double> t);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grads;  // same layout as DenoiserParams::values
};

/// Mean squared velocity error over every sample and dimension, with
/// reverse-mode gradients accumulated sample by sample.
LossGrad loss_and_grad(const DenoiserParams& p, const FlowBatch& batch);
double loss_only(const DenoiserParams& p, const FlowBatch& batch);

}  // namespace freqwarm::flow

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "freqwarm/denoiser.hpp"
#include "freqwarm/tensor.hpp"

namespace freqwarm::flow {

/// Per-channel affine map to zero mean and unit variance.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  Tensor3 standardize(const Tensor3& z) const;
  Tensor3 destandardize(const Tensor3& z) const;
  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Statistics over every position of every latent, two-pass. Channels with
/// zero spread get stddev 1.
Standardizer fit_standardizer(const std::vector<Tensor3>& latents);

struct FlowTrainConfig {
  std::size_t steps = 1000;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// A latent set the trainer may draw targets from. All sources of one run
/// must share length and shape so batch indices mean the same image.
struct TargetSource {
  std::string provenance;
  const std::vector<Tensor3>* latents = nullptr;
};

/// Picks the source used at each step.
using TargetSchedule = std::function<std::size_t(std::size_t step)>;

struct FlowTrainResult {
  DenoiserParams params;
  std::vector<double> loss_trace;
  std::vector<std::size_t> source_trace;  // schedule output per step
};

/// Rectified-flow training. Each step draws, from one Philox stream keyed by
/// `config.seed`, per sample: a dataset index, t ~ U[0, 1), and z0 ~ N(0, I).
/// The draws never depend on which source supplies z1, so runs that differ only
/// in their schedule see identical batch indices, times and noise.
FlowTrainResult train_flow(const DenoiserParams& init, const Standardizer& stats,
                           const std::vector<TargetSource>& sources,
                           const TargetSchedule& schedule, const FlowTrainConfig& config);

/// Single-source convenience: standardization fitted on `latents`.
FlowTrainResult train_flow(const DenoiserParams& init, const std::vector<Tensor3>& latents,
                           const FlowTrainConfig& config, Standardizer* fitted = nullptr);

/// Euler integration of dz/dt = v(z, t) from seeded N(0, I) noise at t = 0 to
/// t = 1 in `steps` uniform steps. Returns samples in standardized space.
Batch sample(const DenoiserParams& p, std::size_t n, std::size_t steps, std::uint64_t seed);

/// The noise sample() starts from.
Batch initial_noise(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Trained generator together with the latent shape and statistics it needs.
struct FlowModel {
  DenoiserParams denoiser;
  Standardizer stats;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
};

/// Samples and maps them back to raw latent space.
std::vector<Tensor3> generate_latents(const FlowModel& model, std::size_t n, std::size_t steps,
                                      std::uint64_t seed);

Tensor3 row_to_latent(std::span<const double> row, std::size_t c, std::size_t h, std::size_t w);

/// flow.txt header, denoiser.fwt (flat parameters) and stats.fwt (2 x C).
void save(const FlowModel& model, const std::filesystem::path& dir);
FlowModel load(const std::filesystem::path& dir);

}  // namespace freqwarm::flow

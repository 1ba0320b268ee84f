#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freqwarm/autoencoder.hpp"
#include "freqwarm/flow.hpp"
#include "freqwarm/spectral.hpp"
#include "freqwarm/tensor.hpp"

namespace freqwarm::experiments {

/// Low-pass threshold on RGB inputs; nullopt is the unfiltered full band.
using Threshold = std::optional<double>;

std::string threshold_label(const Threshold& t);
Threshold parse_threshold(const std::string& text);

/// Frequency warm-up: the first round(warmup_fraction * total_steps) steps
/// train on latents of images low-passed at r0, the rest on full-band latents.
struct CurriculumConfig {
  bool enabled = true;
  double r0 = 0.2;
  double warmup_fraction = 0.8;

  std::size_t warmup_steps(std::size_t total_steps) const;
};

void validate(const CurriculumConfig& c);

// --- decoder analysis ------------------------------------------------------

struct DecoderCondition {
  double radius = 0.0;
  spectral::RadialSpectrum low;   // RGB spectrum of decode(Z_low)
  spectral::RadialSpectrum high;  // RGB spectrum of decode(Z_high)
  spectral::RadialSpectrum full;  // RGB spectrum of decode(Z)
  // Pooled over images: energy above `energy_cutoff` divided by total energy.
  double low_share_above = 0.0;
  double high_share_above = 0.0;
  // Energy of each band reconstruction relative to the full reconstruction.
  double low_energy_fraction = 0.0;
  double high_energy_fraction = 0.0;
  // max |decode(Z_low) + decode(Z_high) - decode(Z)| over every pixel.
  double additivity_residual = 0.0;
};

struct DecoderAnalysisOptions {
  std::vector<double> radii = {0.05, 0.10, 0.15, 0.20};
  double energy_cutoff = 0.1;
  std::size_t bin_count = 0;
  // When set, the first `saved_images` inputs are written as PNGs per radius.
  std::optional<std::filesystem::path> image_dir;
  std::size_t saved_images = 4;
};

struct DecoderReport {
  double energy_cutoff = 0.1;
  std::vector<DecoderCondition> conditions;
};

DecoderReport analyze_decoder(const autoencoder::AEParams& ae, const std::vector<Tensor3>& images,
                              const DecoderAnalysisOptions& options = {});

/// Fraction of sum |X|^2 carried by bins with normalized radius > cutoff.
double energy_share_above(const spectral::SpectralField& s, double cutoff);

// --- encoder analysis ------------------------------------------------------

struct EncoderReport {
  std::vector<Threshold> thresholds;
  std::vector<spectral::RadialSpectrum> spectra;  // latent spectra, one per threshold
};

inline const std::vector<Threshold> kDefaultEncoderThresholds = {0.03, 0.05, 0.20, std::nullopt};

EncoderReport analyze_encoder(const autoencoder::AEParams& ae, const std::vector<Tensor3>& images,
                              const std::vector<Threshold>& thresholds = kDefaultEncoderThresholds,
                              std::size_t bin_count = 0);

// --- amplitude gap ---------------------------------------------------------

inline constexpr double kDefaultHighCutoff = 0.35;

/// Mean over bins lying entirely above `high_cutoff` (lower edge >= cutoff)
/// and non-empty in both spectra of log10(filtered + eps) - log10(full + eps).
double amplitude_gap(const spectral::RadialSpectrum& filtered, const spectral::RadialSpectrum& full,
                     double high_cutoff = kDefaultHighCutoff);

struct GapSweepConfig {
  std::size_t compression = 4;
  autoencoder::Variant variant = autoencoder::Variant::kTrainableLinear;
  std::uint64_t ae_seed = 0;
  std::size_t ae_steps = 2000;
  double ae_learning_rate = 1e-3;
  double r0 = 0.2;
  double high_cutoff = kDefaultHighCutoff;
  std::size_t bin_count = 0;
};

struct GapReport {
  std::size_t channels = 0;
  spectral::RadialSpectrum filtered;
  spectral::RadialSpectrum full;
  double delta = 0.0;
};

std::vector<GapReport> amplitude_gap_sweep(const std::vector<std::size_t>& channel_counts,
                                           const std::vector<Tensor3>& images,
                                           const GapSweepConfig& config);

/// Kendall tau-b rank correlation.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// --- curriculum training ---------------------------------------------------

struct GeneratorConfig {
  std::size_t hidden_width = 0;
  flow::FlowTrainConfig train;
  std::size_t sample_count = 256;
  std::size_t sample_steps = 50;
  std::size_t bin_count = 0;
};

struct ExperimentRecord {
  std::string run_id;
  std::string variant;  // "baseline" or "freqwarm"
  std::size_t channels = 0;
  std::size_t compression = 0;
  double r0 = 0.0;
  double warmup_fraction = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double latent_spectral_distance = 0.0;
  double decoded_spectral_distance = 0.0;
  std::vector<double> loss_trace;
  std::vector<std::size_t> source_trace;  // 0 = full band, 1 = low-passed
  flow::FlowModel model;
};

/// Trains a generator on latents of `train_images` under `curriculum` and
/// scores its samples against `heldout_images`. The autoencoder is only read.
/// Disabling the curriculum is the baseline arm; both arms share every
/// random draw for a given generator seed.
ExperimentRecord train_with_curriculum(const autoencoder::AEParams& ae,
                                       const std::vector<Tensor3>& train_images,
                                       const std::vector<Tensor3>& heldout_images,
                                       const GeneratorConfig& generator,
                                       const CurriculumConfig& curriculum);

/// Evaluation loss of `model` on a fixed batch built from held-out latents.
double evaluation_loss(const flow::FlowModel& model, const std::vector<Tensor3>& latents,
                       std::uint64_t seed);

/// One curriculum run per threshold (each capped at the maximum radius), all
/// sharing the generator seed.
std::vector<ExperimentRecord> threshold_sweep(const std::vector<double>& r0_values,
                                              const autoencoder::AEParams& ae,
                                              const std::vector<Tensor3>& train_images,
                                              const std::vector<Tensor3>& heldout_images,
                                              const GeneratorConfig& generator,
                                              const CurriculumConfig& curriculum);

inline constexpr std::size_t kEvaluationBatch = 256;

}  // namespace freqwarm::experiments

#include "freqwarm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "freqwarm/error.hpp"
#include "freqwarm/random.hpp"
#include "freqwarm/tensor_io.hpp"

namespace freqwarm::experiments {
namespace {

std::vector<Tensor3> encode_all(const autoencoder::AEParams& ae, const std::vector<Tensor3>& xs,
                                const Threshold& threshold) {
  std::vector<Tensor3> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    out.push_back(autoencoder::encode(ae, threshold ? spectral::lowpass(x, *threshold) : x));
  }
  return out;
}

spectral::RadialSpectrum pooled_spectrum(const std::vector<Tensor3>& xs, std::size_t bins) {
  require(!xs.empty(), ErrorKind::kInvalidArgument, "no tensors to measure");
  spectral::RadialAccumulator acc(xs.front().height, xs.front().width, bins);
  for (const auto& x : xs) acc.add(x);
  return acc.result();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string threshold_label(const Threshold& t) {
  if (!t) return "full";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", *t);
  return buf;
}

Threshold parse_threshold(const std::string& text) {
  if (text == "full") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == text.size() && !text.empty(), ErrorKind::kInvalidArgument,
          "threshold '" + text + "' is neither a number nor 'full'");
  require(v >= 0.0 && v <= spectral::kMaxRadius, ErrorKind::kOutOfRange,
          "threshold " + text + " outside [0, sqrt(2)/2]");
  return v;
}

std::size_t CurriculumConfig::warmup_steps(std::size_t total_steps) const {
  if (!enabled) return 0;
  const auto w = static_cast<std::size_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
  return std::min(w, total_steps);
}

void validate(const CurriculumConfig& c) {
  require(c.r0 > 0.0 && c.r0 <= spectral::kMaxRadius, ErrorKind::kOutOfRange,
          "r0 must lie in (0, sqrt(2)/2]");
  require(c.warmup_fraction >= 0.0 && c.warmup_fraction <= 1.0, ErrorKind::kOutOfRange,
          "warmup fraction must lie in [0, 1]");
}

double energy_share_above(const spectral::SpectralField& s, double cutoff) {
  double above = 0.0, total = 0.0;
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t u = 0; u < s.height; ++u) {
      for (std::size_t v = 0; v < s.width; ++v) {
        const double e = std::norm(s.at(c, u, v));
        total += e;
        if (spectral::normalized_radius(u, v, s.height, s.width) > cutoff) above += e;
      }
    }
  }
  return total > 0.0 ? above / total : 0.0;
}

DecoderReport analyze_decoder(const autoencoder::AEParams& ae, const std::vector<Tensor3>& images,
                              const DecoderAnalysisOptions& options) {
  require(!images.empty(), ErrorKind::kInvalidArgument, "analyze_decoder: no images");
  for (double r : options.radii) {
    require(r >= 0.0 && r <= spectral::kMaxRadius, ErrorKind::kOutOfRange,
            "decoder radius outside [0, sqrt(2)/2]");
  }
  if (options.image_dir) std::filesystem::create_directories(*options.image_dir);

  const std::size_t h = images.front().height, w = images.front().width;
  std::vector<Tensor3> latents;
  std::vector<Tensor3> recon;
  for (const auto& x : images) {
    latents.push_back(autoencoder::encode(ae, x));
    recon.push_back(autoencoder::decode(ae, latents.back()));
  }

  DecoderReport report{options.energy_cutoff, {}};
  for (double r : options.radii) {
    spectral::RadialAccumulator low_acc(h, w, options.bin_count), high_acc(h, w, options.bin_count),
        full_acc(h, w, options.bin_count);
    double low_above = 0.0, low_total = 0.0, high_above = 0.0, high_total = 0.0, full_total = 0.0;
    double residual = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const auto bands = spectral::decompose(latents[i], r);
      const Tensor3 low = autoencoder::decode(ae, bands.low);
      const Tensor3 high = autoencoder::decode(ae, bands.high);
      for (std::size_t k = 0; k < low.size(); ++k) {
        residual = std::max(residual, std::abs(low.values[k] + high.values[k] - recon[i].values[k]));
      }
      const auto s_low = spectral::to_spectrum(low);
      const auto s_high = spectral::to_spectrum(high);
      const auto s_full = spectral::to_spectrum(recon[i]);
      low_acc.add(s_low);
      high_acc.add(s_high);
      full_acc.add(s_full);
      const double e_low = energy(low), e_high = energy(high);
      low_above += energy_share_above(s_low, options.energy_cutoff) * e_low;
      high_above += energy_share_above(s_high, options.energy_cutoff) * e_high;
      low_total += e_low;
      high_total += e_high;
      full_total += energy(recon[i]);
      if (options.image_dir && i < options.saved_images) {
        char name[64];
        std::snprintf(name, sizeof(name), "%06zu_r%.2f_", i, r);
        io::save_image(low, *options.image_dir / (std::string(name) + "low.png"));
        io::save_image(high, *options.image_dir / (std::string(name) + "high.png"));
      }
    }
    DecoderCondition cond;
    cond.radius = r;
    cond.low = low_acc.result();
    cond.high = high_acc.result();
    cond.full = full_acc.result();
    cond.low_share_above = low_total > 0.0 ? low_above / low_total : 0.0;
    cond.high_share_above = high_total > 0.0 ? high_above / high_total : 0.0;
    cond.low_energy_fraction = full_total > 0.0 ? low_total / full_total : 0.0;
    cond.high_energy_fraction = full_total > 0.0 ? high_total / full_total : 0.0;
    cond.additivity_residual = residual;
    report.conditions.push_back(std::move(cond));
  }
  return report;
}

EncoderReport analyze_encoder(const autoencoder::AEParams& ae, const std::vector<Tensor3>& images,
                              const std::vector<Threshold>& thresholds, std::size_t bin_count) {
  require(!images.empty(), ErrorKind::kInvalidArgument, "analyze_encoder: no images");
  EncoderReport report{thresholds, {}};
  for (const auto& t : thresholds) {
    if (t) {
      require(*t >= 0.0 && *t <= spectral::kMaxRadius, ErrorKind::kOutOfRange,
              "encoder threshold outside [0, sqrt(2)/2]");
    }
    report.spectra.push_back(pooled_spectrum(encode_all(ae, images, t), bin_count));
  }
  return report;
}

double amplitude_gap(const spectral::RadialSpectrum& filtered, const spectral::RadialSpectrum& full,
                     double high_cutoff) {
  require(filtered.upper_edges == full.upper_edges, ErrorKind::kInvalidArgument,
          "amplitude_gap: spectra use different bins");
  double sum = 0.0;
  std::size_t bins = 0;
  for (std::size_t b = 0; b < full.bin_count(); ++b) {
    if (full.lower_edge(b) < high_cutoff || filtered.empty(b) || full.empty(b)) continue;
    sum += std::log10(filtered.mean_amplitude[b] + spectral::kLogSpectralEpsilon) -
           std::log10(full.mean_amplitude[b] + spectral::kLogSpectralEpsilon);
    ++bins;
  }
  require(bins > 0, ErrorKind::kInvalidArgument,
          "amplitude_gap: no non-empty bins above the high-frequency cutoff");
  return sum / static_cast<double>(bins);
}

std::vector<GapReport> amplitude_gap_sweep(const std::vector<std::size_t>& channel_counts,
                                           const std::vector<Tensor3>& images,
                                           const GapSweepConfig& config) {
  require(config.r0 > 0.0 && config.r0 <= spectral::kMaxRadius, ErrorKind::kOutOfRange,
          "gap sweep r0 outside (0, sqrt(2)/2]");
  std::vector<GapReport> out;
  for (std::size_t c : channel_counts) {
    const autoencoder::AEConfig ae_config{config.compression, c, config.variant, config.ae_seed};
    const autoencoder::AEParams ae =
        config.variant == autoencoder::Variant::kTrainableLinear
            ? autoencoder::train_ae(ae_config, images, config.ae_steps, config.ae_learning_rate).params
            : autoencoder::init(ae_config);
    const EncoderReport enc = analyze_encoder(ae, images, {config.r0, std::nullopt}, config.bin_count);
    GapReport g{c, enc.spectra[0], enc.spectra[1], 0.0};
    g.delta = amplitude_gap(g.filtered, g.full, config.high_cutoff);
    out.push_back(std::move(g));
  }
  return out;
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::kInvalidArgument,
          "kendall_tau needs two equally long series of length >= 2");
  double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ties_x += 1.0;
      } else if (dy == 0.0) {
        ties_y += 1.0;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double denom = std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
  return denom > 0.0 ? (concordant - discordant) / denom : 0.0;
}

double evaluation_loss(const flow::FlowModel& model, const std::vector<Tensor3>& latents,
                       std::uint64_t seed) {
  require(!latents.empty(), ErrorKind::kInvalidArgument, "evaluation_loss: no latents");
  const std::size_t dim = model.denoiser.data_dim();
  RandomStream rng(seed, stream_tag("flow.eval"));
  const std::size_t n = kEvaluationBatch;
  flow::Batch z0{n, dim, std::vector<double>(n * dim)};
  flow::Batch z1{n, dim, std::vector<double>(n * dim)};
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor3 zs = model.stats.standardize(latents[i % latents.size()]);
    t[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    for (std::size_t k = 0; k < dim; ++k) {
      z0.values[i * dim + k] = rng.normal();
      z1.values[i * dim + k] = zs.values[k];
    }
  }
  return flow::loss_only(model.denoiser, flow::make_flow_batch(std::move(z0), std::move(z1), std::move(t)));
}

ExperimentRecord train_with_curriculum(const autoencoder::AEParams& ae,
                                       const std::vector<Tensor3>& train_images,
                                       const std::vector<Tensor3>& heldout_images,
                                       const GeneratorConfig& generator,
                                       const CurriculumConfig& curriculum) {
  validate(curriculum);
  require(!train_images.empty(), ErrorKind::kInvalidArgument, "no training images");
  require(!heldout_images.empty(), ErrorKind::kInvalidArgument, "no held-out images");
  require(generator.sample_count >= 1, ErrorKind::kOutOfRange, "sample count must be positive");

  const std::size_t total = generator.train.steps;
  const std::size_t warmup = curriculum.warmup_steps(total);
  const std::vector<Tensor3> full = encode_all(ae, train_images, std::nullopt);
  std::vector<Tensor3> filtered;
  if (warmup > 0) filtered = encode_all(ae, train_images, curriculum.r0);

  const Tensor3& shape = full.front();
  flow::FlowModel model;
  model.channels = shape.channels;
  model.height = shape.height;
  model.width = shape.width;
  model.stats = flow::fit_standardizer(full);
  const flow::DenoiserParams init =
      flow::make_denoiser(shape.size(), generator.hidden_width, generator.train.seed);

  std::vector<flow::TargetSource> sources = {{"full", &full}};
  if (warmup > 0) sources.push_back({"lowpass", &filtered});
  const auto schedule = [warmup](std::size_t step) -> std::size_t { return step < warmup ? 1 : 0; };
  flow::FlowTrainResult trained =
      flow::train_flow(init, model.stats, sources, schedule, generator.train);
  model.denoiser = std::move(trained.params);

  const std::vector<Tensor3> heldout = encode_all(ae, heldout_images, std::nullopt);
  const std::vector<Tensor3> generated = flow::generate_latents(
      model, generator.sample_count, generator.sample_steps, generator.train.seed);
  std::vector<Tensor3> decoded_generated, decoded_heldout;
  for (const auto& z : generated) decoded_generated.push_back(autoencoder::decode(ae, z));
  for (const auto& z : heldout) decoded_heldout.push_back(autoencoder::decode(ae, z));

  ExperimentRecord rec;
  rec.variant = curriculum.enabled ? "freqwarm" : "baseline";
  rec.channels = ae.config.channels;
  rec.compression = ae.config.compression;
  rec.r0 = curriculum.r0;
  rec.warmup_fraction = curriculum.enabled ? curriculum.warmup_fraction : 0.0;
  rec.steps = total;
  rec.seed = generator.train.seed;
  rec.final_loss = evaluation_loss(model, heldout, generator.train.seed);
  rec.latent_spectral_distance = spectral::log_spectral_distance(
      pooled_spectrum(generated, generator.bin_count), pooled_spectrum(heldout, generator.bin_count));
  rec.decoded_spectral_distance =
      spectral::log_spectral_distance(pooled_spectrum(decoded_generated, generator.bin_count),
                                      pooled_spectrum(decoded_heldout, generator.bin_count));
  rec.loss_trace = std::move(trained.loss_trace);
  rec.source_trace = std::move(trained.source_trace);
  rec.model = std::move(model);

  char key[256];
  std::snprintf(key, sizeof(key), "%s|c%zu|f%zu|r%.9g|w%.9g|s%zu|seed%llu|h%zu|b%zu|lr%.9g",
                rec.variant.c_str(), rec.channels, rec.compression, rec.r0, rec.warmup_fraction,
                rec.steps, static_cast<unsigned long long>(rec.seed), generator.hidden_width,
                generator.train.batch_size, generator.train.learning_rate);
  rec.run_id = hex64(stream_tag(key));
  return rec;
}

std::vector<ExperimentRecord> threshold_sweep(const std::vector<double>& r0_values,
                                              const autoencoder::AEParams& ae,
                                              const std::vector<Tensor3>& train_images,
                                              const std::vector<Tensor3>& heldout_images,
                                              const GeneratorConfig& generator,
                                              const CurriculumConfig& curriculum) {
  require(!r0_values.empty(), ErrorKind::kInvalidArgument, "threshold sweep needs r0 values");
  std::vector<ExperimentRecord> out;
  for (double r0 : r0_values) {
    CurriculumConfig c = curriculum;
    c.enabled = true;
    c.r0 = std::min(r0, spectral::kMaxRadius);
    out.push_back(train_with_curriculum(ae, train_images, heldout_images, generator, c));
  }
  return out;
}

}  // namespace freqwarm::experiments

// freqwarm: datasets, toy autoencoders, frequency analyses and warm-up
// curriculum experiments from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "freqwarm/autoencoder.hpp"
#include "freqwarm/dataset.hpp"
#include "freqwarm/error.hpp"
#include "freqwarm/experiments.hpp"
#include "freqwarm/flow.hpp"
#include "freqwarm/report.hpp"
#include "freqwarm/run_config.hpp"
#include "freqwarm/spectral.hpp"
#include "freqwarm/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace freqwarm;

namespace {

constexpr const char* kOutputRootEnv = "FREQWARM_OUTPUT_ROOT";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return 2;
    case ErrorKind::kUnknownKey: return 3;
    case ErrorKind::kMissingPath: return 4;
    case ErrorKind::kOutOfRange: return 5;
    case ErrorKind::kIo: return 6;
    case ErrorKind::kFormat: return 7;
    case ErrorKind::kNumerical: return 8;
  }
  return 1;
}

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> assignments;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "key=value config file");
  cmd->add_option("--set", o.assignments, "override one config key (key=value); repeatable");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig config;
  if (!o.config_file.empty()) config.merge_file(o.config_file);
  for (const auto& a : o.assignments) config.merge_assignment(a);
  return config;
}

fs::path output_dir(const CommonOptions& o, const std::string& subcommand) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "freqwarm_out") / subcommand;
}

std::vector<Tensor3> load_images(const RunConfig& config, const std::string& data_dir) {
  if (!data_dir.empty()) {
    return data::read_dataset_dir(data_dir, config.get_size("data.count"));
  }
  return data::generate(dataset_spec(config));
}

autoencoder::AEParams obtain_ae(const RunConfig& config, const std::vector<Tensor3>& images,
                                std::vector<double>* trace = nullptr) {
  const auto ae = ae_config(config);
  if (ae.variant == autoencoder::Variant::kAnalyticDct) return autoencoder::init(ae);
  auto result = autoencoder::train_ae(ae, images, config.get_size("ae.steps"),
                                      config.get_double("ae.lr"));
  if (trace) *trace = std::move(result.loss_trace);
  return std::move(result.params);
}

// Flag values enter the config with round-trip precision so the echo replays them exactly.
std::string exact_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_echo(const fs::path& dir, const RunConfig& config) {
  report::write_text(dir / "config_echo.txt", config.echo());
}

// Splits the configured dataset into training images and the held-out tail.
struct Split {
  std::vector<Tensor3> train;
  std::vector<Tensor3> heldout;
};

Split split_dataset(std::vector<Tensor3> images, std::size_t holdout) {
  require(holdout >= 1 && holdout < images.size(), ErrorKind::kOutOfRange,
          "flow.holdout must be in [1, data.count)");
  Split s;
  s.heldout.assign(images.end() - static_cast<std::ptrdiff_t>(holdout), images.end());
  images.resize(images.size() - holdout);
  s.train = std::move(images);
  return s;
}

void write_run(const fs::path& dir, const experiments::ExperimentRecord& rec) {
  report::write_text(dir / "loss_trace.csv", report::loss_trace_csv(rec.loss_trace));
  flow::save(rec.model, dir / "model");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency analyses of autoencoder latents and frequency warm-up training"};
  app.require_subcommand(1);

  CommonOptions gen_opts, ae_opts, dec_opts, enc_opts, gap_opts, flow_opts, sweep_opts, spec_opts;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset directory");
  add_common(gen, gen_opts);
  std::string kind;
  std::optional<std::size_t> count, height, width;
  std::optional<std::uint64_t> seed;
  std::optional<double> cutoff;
  gen->add_option("--kind", kind, "dataset kind");
  gen->add_option("--count", count);
  gen->add_option("--height", height);
  gen->add_option("--width", width);
  gen->add_option("--seed", seed);
  gen->add_option("--cutoff", cutoff, "bandlimited cutoff radius");

  // train-ae
  auto* train_ae = app.add_subcommand("train-ae", "train or build a toy autoencoder");
  add_common(train_ae, ae_opts);
  std::string ae_data;
  train_ae->add_option("--data", ae_data, "dataset directory (default: generate from config)");

  // analyze-decoder
  auto* dec = app.add_subcommand("analyze-decoder", "latent low/high band reconstruction analysis");
  add_common(dec, dec_opts);
  std::string dec_model, dec_data, radii;
  bool save_images = false;
  dec->add_option("--model", dec_model, "autoencoder directory")->required();
  dec->add_option("--data", dec_data, "dataset directory (default: generate from config)");
  dec->add_option("--radii", radii, "comma-separated latent radii");
  dec->add_flag("--save-images", save_images, "write band reconstructions as PNG");

  // analyze-encoder
  auto* enc = app.add_subcommand("analyze-encoder", "latent spectra of low-passed RGB inputs");
  add_common(enc, enc_opts);
  std::string enc_model, enc_data, thresholds;
  enc->add_option("--model", enc_model, "autoencoder directory")->required();
  enc->add_option("--data", enc_data, "dataset directory (default: generate from config)");
  enc->add_option("--thresholds", thresholds, "comma-separated RGB thresholds; 'full' = no filter");

  // gap-sweep
  auto* gap = app.add_subcommand("gap-sweep", "high-band amplitude gap versus channel count");
  add_common(gap, gap_opts);
  std::string channels, gap_data;
  gap->add_option("--channels", channels, "comma-separated channel counts");
  gap->add_option("--data", gap_data, "dataset directory (default: generate from config)");

  // train-flow
  auto* tf = app.add_subcommand("train-flow", "train a flow-matching generator on latents");
  add_common(tf, flow_opts);
  std::string tf_model, tf_data, freqwarm_flag;
  std::optional<double> r0, warmup;
  tf->add_option("--model", tf_model, "autoencoder directory (default: build from config)");
  tf->add_option("--data", tf_data, "dataset directory (default: generate from config)");
  tf->add_option("--freqwarm", freqwarm_flag, "on|off")
      ->expected(0, 1)
      ->default_str("on");
  tf->add_option("--r0", r0, "low-pass threshold for the warm-up phase");
  tf->add_option("--warmup-frac", warmup, "fraction of steps spent in warm-up");

  // threshold-sweep
  auto* sweep = app.add_subcommand("threshold-sweep", "curriculum runs over a grid of r0");
  add_common(sweep, sweep_opts);
  std::string grid, sweep_model, sweep_data;
  sweep->add_option("--grid", grid, "comma-separated r0 values");
  sweep->add_option("--model", sweep_model, "autoencoder directory (default: build from config)");
  sweep->add_option("--data", sweep_data, "dataset directory (default: generate from config)");

  // spectra
  auto* spec = app.add_subcommand("spectra", "radial amplitude spectrum of an image or tensor");
  add_common(spec, spec_opts);
  std::string input;
  std::size_t bins = 0;
  spec->add_option("--input", input, "PNG image or FWT1 tensor")->required();
  spec->add_option("--bins", bins, "annulus count (0 = min(H, W) / 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "freqwarm: error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      RunConfig config = resolve(gen_opts);
      if (!kind.empty()) config.set("data.kind", kind);
      if (count) config.set("data.count", std::to_string(*count));
      if (height) config.set("data.height", std::to_string(*height));
      if (width) config.set("data.width", std::to_string(*width));
      if (seed) config.set("data.seed", std::to_string(*seed));
      if (cutoff) config.set("data.cutoff", exact_real(*cutoff));
      const fs::path out = output_dir(gen_opts, "gen-data");
      data::write_dataset_dir(data::generate(dataset_spec(config)), out);
      write_echo(out, config);
    } else if (train_ae->parsed()) {
      const RunConfig config = resolve(ae_opts);
      const fs::path out = output_dir(ae_opts, "train-ae");
      const auto images = load_images(config, ae_data);
      std::vector<double> trace;
      const auto ae = obtain_ae(config, images, &trace);
      autoencoder::save(ae, out);
      report::write_text(out / "loss_trace.csv", report::loss_trace_csv(trace));
      report::write_text(out / "reconstruction.csv",
                         "mse\n" + report::format_real(autoencoder::reconstruction_mse(ae, images)) + "\n");
      write_echo(out, config);
    } else if (dec->parsed()) {
      RunConfig config = resolve(dec_opts);
      if (!radii.empty()) config.set("analysis.radii", radii);
      if (save_images) config.set("analysis.save_images", "4");
      const fs::path out = output_dir(dec_opts, "analyze-decoder");
      const auto ae = autoencoder::load(dec_model);
      experiments::DecoderAnalysisOptions options;
      options.radii = config.get_doubles("analysis.radii");
      options.energy_cutoff = config.get_double("analysis.energy_cutoff");
      options.bin_count = config.get_size("analysis.bins");
      options.saved_images = config.get_size("analysis.save_images");
      if (options.saved_images > 0) options.image_dir = out / "images";
      const auto result = experiments::analyze_decoder(ae, load_images(config, dec_data), options);
      report::write_text(out / "decoder_spectra.csv", report::decoder_spectra_csv(result));
      report::write_text(out / "decoder_summary.csv", report::decoder_summary_csv(result));
      write_echo(out, config);
    } else if (enc->parsed()) {
      RunConfig config = resolve(enc_opts);
      if (!thresholds.empty()) config.set("analysis.thresholds", thresholds);
      const fs::path out = output_dir(enc_opts, "analyze-encoder");
      const auto ae = autoencoder::load(enc_model);
      std::vector<experiments::Threshold> ts;
      for (const auto& t : config.get_strings("analysis.thresholds")) {
        ts.push_back(experiments::parse_threshold(t));
      }
      const auto result = experiments::analyze_encoder(ae, load_images(config, enc_data), ts,
                                                       config.get_size("analysis.bins"));
      report::write_text(out / "encoder_spectra.csv", report::encoder_csv(result));
      write_echo(out, config);
    } else if (gap->parsed()) {
      RunConfig config = resolve(gap_opts);
      if (!channels.empty()) config.set("gap.channels", channels);
      const fs::path out = output_dir(gap_opts, "gap-sweep");
      const auto gaps = experiments::amplitude_gap_sweep(
          config.get_sizes("gap.channels"), load_images(config, gap_data), gap_sweep_config(config));
      report::write_text(out / "gap.csv", report::gap_csv(gaps));
      report::write_text(out / "gap_spectra.csv", report::gap_spectra_csv(gaps));
      write_echo(out, config);
    } else if (tf->parsed()) {
      RunConfig config = resolve(flow_opts);
      if (tf->count("--freqwarm") > 0) {
        const std::string v = freqwarm_flag.empty() ? "on" : freqwarm_flag;
        require(v == "on" || v == "off", ErrorKind::kInvalidArgument, "--freqwarm expects on|off");
        config.set("curriculum.enabled", v == "on" ? "true" : "false");
      }
      if (r0) config.set("curriculum.r0", exact_real(*r0));
      if (warmup) config.set("curriculum.warmup_fraction", exact_real(*warmup));
      const fs::path out = output_dir(flow_opts, "train-flow");
      const auto curriculum = curriculum_config(config);
      const auto generator = generator_config(config);
      Split split = split_dataset(load_images(config, tf_data), config.get_size("flow.holdout"));
      const auto ae = tf_model.empty() ? obtain_ae(config, split.train) : autoencoder::load(tf_model);
      const auto rec =
          experiments::train_with_curriculum(ae, split.train, split.heldout, generator, curriculum);
      report::write_text(out / "report.csv", report::experiment_csv({rec}));
      write_run(out, rec);
      write_echo(out, config);
    } else if (sweep->parsed()) {
      RunConfig config = resolve(sweep_opts);
      if (!grid.empty()) config.set("sweep.r0", grid);
      const fs::path out = output_dir(sweep_opts, "threshold-sweep");
      const auto curriculum = curriculum_config(config);
      const auto generator = generator_config(config);
      Split split = split_dataset(load_images(config, sweep_data), config.get_size("flow.holdout"));
      const auto ae =
          sweep_model.empty() ? obtain_ae(config, split.train) : autoencoder::load(sweep_model);
      const auto records = experiments::threshold_sweep(config.get_doubles("sweep.r0"), ae,
                                                        split.train, split.heldout, generator,
                                                        curriculum);
      report::write_text(out / "threshold_sweep.csv", report::experiment_csv(records));
      for (const auto& rec : records) {
        report::write_text(out / ("loss_trace_r" + report::format_real(rec.r0) + ".csv"),
                           report::loss_trace_csv(rec.loss_trace));
      }
      write_echo(out, config);
    } else if (spec->parsed()) {
      const fs::path out = output_dir(spec_opts, "spectra");
      const fs::path path(input);
      Tensor3 x = path.extension() == ".png" ? io::load_image(path)
                                             : io::to_tensor3(io::read_tensor(path));
      report::write_text(out / "spectra.csv",
                         report::radial_csv(spectral::radial_spectrum(x, bins)));
    }
  } catch (const Error& e) {
    std::cerr << "freqwarm: error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "freqwarm: error[" << to_string(ErrorKind::kIo) << "]: " << e.what() << "\n";
    return exit_code(ErrorKind::kIo);
  } catch (const std::exception& e) {
    std::cerr << "freqwarm: error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

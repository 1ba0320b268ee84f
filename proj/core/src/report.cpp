#include "freqwarm/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "freqwarm/error.hpp"

namespace freqwarm::report {
namespace {

void append_radial_rows(std::string& out, const std::string& prefix,
                        const spectral::RadialSpectrum& s, std::size_t b) {
  out += prefix + std::to_string(b) + "," + format_real(s.lower_edge(b)) + "," +
         format_real(s.upper_edges[b]) + "," + format_real(s.mean_amplitude[b]) + "," +
         std::to_string(s.sample_count[b]) + "\n";
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string experiment_csv(const std::vector<experiments::ExperimentRecord>& records) {
  std::string out =
      "run_id,variant,c,f,r0,warmup_fraction,steps,seed,final_loss,latent_spectral_distance,"
      "decoded_spectral_distance\n";
  for (const auto& r : records) {
    out += r.run_id + "," + r.variant + "," + std::to_string(r.channels) + "," +
           std::to_string(r.compression) + "," + format_real(r.r0) + "," +
           format_real(r.warmup_fraction) + "," + std::to_string(r.steps) + "," +
           std::to_string(r.seed) + "," + format_real(r.final_loss) + "," +
           format_real(r.latent_spectral_distance) + "," +
           format_real(r.decoded_spectral_distance) + "\n";
  }
  return out;
}

std::string radial_csv(const spectral::RadialSpectrum& s) {
  std::string out = "bin,lower_edge,upper_edge,mean_amplitude,sample_count\n";
  for (std::size_t b = 0; b < s.bin_count(); ++b) append_radial_rows(out, "", s, b);
  return out;
}

std::string encoder_csv(const experiments::EncoderReport& r) {
  std::string out = "threshold,bin,lower_edge,upper_edge,mean_amplitude,sample_count\n";
  if (r.spectra.empty()) return out;
  for (std::size_t b = 0; b < r.spectra.front().bin_count(); ++b) {
    for (std::size_t t = 0; t < r.thresholds.size(); ++t) {
      append_radial_rows(out, experiments::threshold_label(r.thresholds[t]) + ",", r.spectra[t], b);
    }
  }
  return out;
}

std::string decoder_spectra_csv(const experiments::DecoderReport& r) {
  std::string out = "radius,band,bin,lower_edge,upper_edge,mean_amplitude,sample_count\n";
  for (const auto& c : r.conditions) {
    const std::string radius = format_real(c.radius) + ",";
    for (std::size_t b = 0; b < c.full.bin_count(); ++b) {
      append_radial_rows(out, radius + "low,", c.low, b);
      append_radial_rows(out, radius + "high,", c.high, b);
      append_radial_rows(out, radius + "full,", c.full, b);
    }
  }
  return out;
}

std::string decoder_summary_csv(const experiments::DecoderReport& r) {
  std::string out =
      "radius,energy_cutoff,low_share_above,high_share_above,low_energy_fraction,"
      "high_energy_fraction,additivity_residual\n";
  for (const auto& c : r.conditions) {
    out += format_real(c.radius) + "," + format_real(r.energy_cutoff) + "," +
           format_real(c.low_share_above) + "," + format_real(c.high_share_above) + "," +
           format_real(c.low_energy_fraction) + "," + format_real(c.high_energy_fraction) + "," +
           format_real(c.additivity_residual) + "\n";
  }
  return out;
}

std::string gap_csv(const std::vector<experiments::GapReport>& gaps) {
  std::string out = "c,delta\n";
  for (const auto& g : gaps) out += std::to_string(g.channels) + "," + format_real(g.delta) + "\n";
  return out;
}

std::string gap_spectra_csv(const std::vector<experiments::GapReport>& gaps) {
  std::string out = "c,condition,bin,lower_edge,upper_edge,mean_amplitude,sample_count\n";
  for (const auto& g : gaps) {
    const std::string c = std::to_string(g.channels) + ",";
    for (std::size_t b = 0; b < g.full.bin_count(); ++b) {
      append_radial_rows(out, c + "filtered,", g.filtered, b);
      append_radial_rows(out, c + "full,", g.full, b);
    }
  }
  return out;
}

std::string loss_trace_csv(const std::vector<double>& trace) {
  std::string out = "step,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i) + "," + format_real(trace[i]) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorKind::kMissingPath, "no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace freqwarm::report

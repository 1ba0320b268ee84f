#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "freqwarm/experiments.hpp"
#include "freqwarm/spectral.hpp"

namespace freqwarm::report {

/// Reals with 9 significant digits ("%.9g").
std::string format_real(double v);

/// run_id,variant,c,f,r0,warmup_fraction,steps,seed,final_loss,
/// latent_spectral_distance,decoded_spectral_distance
std::string experiment_csv(const std::vector<experiments::ExperimentRecord>& records);

/// bin,lower_edge,upper_edge,mean_amplitude,sample_count
std::string radial_csv(const spectral::RadialSpectrum& s);

/// threshold,bin,lower_edge,upper_edge,mean_amplitude,sample_count; for each
/// bin, one row per threshold in the order given.
std::string encoder_csv(const experiments::EncoderReport& r);

/// radius,band,bin,lower_edge,upper_edge,mean_amplitude,sample_count
std::string decoder_spectra_csv(const experiments::DecoderReport& r);
/// radius,energy_cutoff,low_share_above,high_share_above,low_energy_fraction,
/// high_energy_fraction,additivity_residual
std::string decoder_summary_csv(const experiments::DecoderReport& r);

/// c,delta
std::string gap_csv(const std::vector<experiments::GapReport>& gaps);
/// c,condition,bin,lower_edge,upper_edge,mean_amplitude,sample_count
std::string gap_spectra_csv(const std::vector<experiments::GapReport>& gaps);

/// step,loss
std::string loss_trace_csv(const std::vector<double>& trace);

/// Writes bytes as-is (LF line endings, no locale translation).
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace freqwarm::report

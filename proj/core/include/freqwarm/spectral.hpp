#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "freqwarm/tensor.hpp"

namespace freqwarm::spectral {

/// Largest normalized radius on the unit frequency square: the corner bin
/// (fy, fx) = (-0.5, -0.5) sits at sqrt(0.5).
inline constexpr double kMaxRadius = std::numbers::sqrt2 / 2.0;

/// Per-channel 2D spectrum. When `centered`, bin (u, v) holds frequency
/// (u - floor(H/2), v - floor(W/2)), i.e. DC sits at (floor(H/2), floor(W/2)).
struct SpectralField {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::complex<double>> values;
  bool centered = false;

  std::size_t plane_size() const { return height * width; }
  std::complex<double>& at(std::size_t c, std::size_t u, std::size_t v) {
    return values[(c * height + u) * width + v];
  }
  const std::complex<double>& at(std::size_t c, std::size_t u, std::size_t v) const {
    return values[(c * height + u) * width + v];
  }
  double max_amplitude() const;
};

/// Binary low-pass mask on a centered H x W grid.
struct CircularMask {
  std::size_t height = 0;
  std::size_t width = 0;
  double radius = 0.0;
  std::vector<std::uint8_t> weights;

  std::size_t ones() const;
  bool all_pass() const { return ones() == weights.size(); }
  bool keeps(std::size_t u, std::size_t v) const { return weights[u * width + v] != 0; }
};

/// Mean |S| per annulus. Bin b covers radii in (lower_b, upper_b], with the DC
/// bin (radius 0) folded into bin 0. Empty bins carry mean 0 and count 0.
struct RadialSpectrum {
  std::vector<double> upper_edges;
  std::vector<double> mean_amplitude;
  std::vector<std::uint64_t> sample_count;

  std::size_t bin_count() const { return upper_edges.size(); }
  double lower_edge(std::size_t b) const { return b == 0 ? 0.0 : upper_edges[b - 1]; }
  bool empty(std::size_t b) const { return sample_count[b] == 0; }
};

/// Forward unnormalized DFT of every channel followed by the origin shift.
SpectralField to_spectrum(const Tensor3& x);

/// Inverse shift and inverse DFT with 1/(H W) normalization; returns the real
/// part. Throws kNumerical when the imaginary residue reaches
/// 1e-6 x max(field amplitude, reference_amplitude).
Tensor3 from_spectrum(const SpectralField& s, double reference_amplitude = 0.0);

double normalized_radius(std::size_t u, std::size_t v, std::size_t height, std::size_t width);

CircularMask make_mask(std::size_t height, std::size_t width, double radius);

/// Multiplies each plane by the mask, or by (1 - mask) when `complement`.
SpectralField apply_mask(const SpectralField& s, const CircularMask& mask, bool complement);

struct Bands {
  Tensor3 low;
  Tensor3 high;
};

Bands decompose(const Tensor3& x, double radius);
Tensor3 lowpass(const Tensor3& x, double radius);
Tensor3 highpass(const Tensor3& x, double radius);

/// floor(min(H, W) / 2), at least 1.
std::size_t default_bin_count(std::size_t height, std::size_t width);

/// Upper edges (b + 1) * dr with dr = kMaxRadius / bin_count; the last edge is
/// pinned to kMaxRadius exactly.
std::vector<double> radial_bin_edges(std::size_t bin_count);

/// Index of the bin whose half-open interval (lower, upper] contains `radius`.
std::size_t radial_bin_of(double radius, const std::vector<double>& upper_edges);

/// bin_count == 0 selects default_bin_count.
RadialSpectrum radial_spectrum(const SpectralField& s, std::size_t bin_count = 0);
RadialSpectrum radial_spectrum(const Tensor3& x, std::size_t bin_count = 0);

/// Sums amplitudes over many fields of one shape in insertion order, so the
/// dataset-level spectrum is the mean over every (image, channel, bin) sample.
class RadialAccumulator {
 public:
  RadialAccumulator(std::size_t height, std::size_t width, std::size_t bin_count = 0);

  void add(const SpectralField& s);
  void add(const Tensor3& x) { add(to_spectrum(x)); }
  RadialSpectrum result() const;
  std::size_t fields() const { return fields_; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> edges_;
  std::vector<std::size_t> bin_of_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
  std::size_t fields_ = 0;
};

inline constexpr double kLogSpectralEpsilon = 1e-12;

/// Mean squared log10 amplitude difference over bins non-empty in both inputs.
double log_spectral_distance(const RadialSpectrum& a, const RadialSpectrum& b);

}  // namespace freqwarm::spectral

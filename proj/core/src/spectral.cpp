#include "freqwarm/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "freqwarm/error.hpp"

namespace freqwarm::spectral {
namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwFree>;

FftwBuffer allocate(std::size_t n) {
  auto* p = fftw_alloc_complex(std::max<std::size_t>(n, 1));
  require(p != nullptr, ErrorKind::kNumerical, "fftw_alloc_complex failed");
  return FftwBuffer(p);
}

// Plans are created once per (channels, height, width, direction) and reused
// through the new-array execute interface, which is thread-safe. Buffers always
// come from fftw_alloc, so every execution sees the alignment the plan assumed.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t channels, std::size_t height, std::size_t width, int sign) {
    const auto key = std::make_tuple(channels, height, width, sign);
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = channels * height * width;
    FftwBuffer in = allocate(n);
    FftwBuffer out = allocate(n);
    const int dims[2] = {static_cast<int>(height), static_cast<int>(width)};
    const int dist = static_cast<int>(height * width);
    fftw_plan plan = fftw_plan_many_dft(2, dims, static_cast<int>(channels), in.get(), nullptr, 1,
                                        dist, out.get(), nullptr, 1, dist, sign, FFTW_ESTIMATE);
    require(plan != nullptr, ErrorKind::kNumerical, "fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

inline std::size_t centered_to_raw(std::size_t u, std::size_t n) {
  return (u + n - n / 2) % n;
}

void require_radius(double radius) {
  require(std::isfinite(radius) && radius >= 0.0 && radius <= kMaxRadius, ErrorKind::kOutOfRange,
          "radius " + std::to_string(radius) + " outside [0, sqrt(2)/2]");
}

}  // namespace

double SpectralField::max_amplitude() const {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}

std::size_t CircularMask::ones() const {
  return static_cast<std::size_t>(std::count(weights.begin(), weights.end(), std::uint8_t{1}));
}

SpectralField to_spectrum(const Tensor3& x) {
  require_finite(x, "to_spectrum");
  require(x.channels > 0 && x.height > 0 && x.width > 0, ErrorKind::kInvalidArgument,
          "to_spectrum: empty tensor");
  const std::size_t n = x.size();
  FftwBuffer in = allocate(n);
  FftwBuffer out = allocate(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.get()[i][0] = x.values[i];
    in.get()[i][1] = 0.0;
  }
  fftw_execute_dft(plan_cache().get(x.channels, x.height, x.width, FFTW_FORWARD), in.get(),
                   out.get());

  SpectralField s{x.channels, x.height, x.width, {}, true};
  s.values.resize(n);
  for (std::size_t c = 0; c < x.channels; ++c) {
    const fftw_complex* plane = out.get() + c * x.plane_size();
    for (std::size_t u = 0; u < x.height; ++u) {
      const std::size_t ru = centered_to_raw(u, x.height);
      for (std::size_t v = 0; v < x.width; ++v) {
        const auto& z = plane[ru * x.width + centered_to_raw(v, x.width)];
        s.at(c, u, v) = {z[0], z[1]};
      }
    }
  }
  return s;
}

Tensor3 from_spectrum(const SpectralField& s, double reference_amplitude) {
  require(s.centered, ErrorKind::kInvalidArgument, "from_spectrum: field is not centered");
  require(s.values.size() == s.channels * s.height * s.width, ErrorKind::kInvalidArgument,
          "from_spectrum: value count does not match shape");
  const std::size_t n = s.values.size();
  FftwBuffer in = allocate(n);
  FftwBuffer out = allocate(n);
  for (std::size_t c = 0; c < s.channels; ++c) {
    fftw_complex* plane = in.get() + c * s.plane_size();
    for (std::size_t u = 0; u < s.height; ++u) {
      const std::size_t ru = centered_to_raw(u, s.height);
      for (std::size_t v = 0; v < s.width; ++v) {
        const auto& z = s.at(c, u, v);
        auto& dst = plane[ru * s.width + centered_to_raw(v, s.width)];
        dst[0] = z.real();
        dst[1] = z.imag();
      }
    }
  }
  fftw_execute_dft(plan_cache().get(s.channels, s.height, s.width, FFTW_BACKWARD), in.get(),
                   out.get());

  const double scale = 1.0 / static_cast<double>(s.plane_size());
  Tensor3 x(s.channels, s.height, s.width);
  double max_imag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x.values[i] = out.get()[i][0] * scale;
    max_imag = std::max(max_imag, std::abs(out.get()[i][1] * scale));
  }
  const double tolerance = 1e-6 * std::max(s.max_amplitude(), reference_amplitude);
  if (max_imag > tolerance) {
    fail(ErrorKind::kNumerical, "from_spectrum: imaginary residue " + std::to_string(max_imag) +
                                    " exceeds tolerance; field is not Hermitian");
  }
  return x;
}

double normalized_radius(std::size_t u, std::size_t v, std::size_t height, std::size_t width) {
  const double fy = (static_cast<double>(u) - static_cast<double>(height / 2)) /
                    static_cast<double>(height);
  const double fx = (static_cast<double>(v) - static_cast<double>(width / 2)) /
                    static_cast<double>(width);
  return std::sqrt(fy * fy + fx * fx);
}

CircularMask make_mask(std::size_t height, std::size_t width, double radius) {
  require_radius(radius);
  require(height > 0 && width > 0, ErrorKind::kInvalidArgument, "make_mask: empty grid");
  CircularMask mask{height, width, radius, std::vector<std::uint8_t>(height * width, 0)};
  for (std::size_t u = 0; u < height; ++u) {
    for (std::size_t v = 0; v < width; ++v) {
      mask.weights[u * width + v] = normalized_radius(u, v, height, width) <= radius ? 1 : 0;
    }
  }
  return mask;
}

SpectralField apply_mask(const SpectralField& s, const CircularMask& mask, bool complement) {
  require(mask.height == s.height && mask.width == s.width, ErrorKind::kInvalidArgument,
          "apply_mask: mask grid does not match field");
  SpectralField out = s;
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t i = 0; i < s.plane_size(); ++i) {
      const bool keep = (mask.weights[i] != 0) != complement;
      if (!keep) out.values[c * s.plane_size() + i] = 0.0;
    }
  }
  return out;
}

Bands decompose(const Tensor3& x, double radius) {
  require_finite(x, "decompose");
  const CircularMask mask = make_mask(x.height, x.width, radius);
  if (mask.all_pass()) return {x, Tensor3(x.channels, x.height, x.width)};
  const SpectralField s = to_spectrum(x);
  const double reference = s.max_amplitude();
  return {from_spectrum(apply_mask(s, mask, false), reference),
          from_spectrum(apply_mask(s, mask, true), reference)};
}

Tensor3 lowpass(const Tensor3& x, double radius) {
  require_finite(x, "lowpass");
  const CircularMask mask = make_mask(x.height, x.width, radius);
  if (mask.all_pass()) return x;
  const SpectralField s = to_spectrum(x);
  return from_spectrum(apply_mask(s, mask, false), s.max_amplitude());
}

Tensor3 highpass(const Tensor3& x, double radius) {
  require_finite(x, "highpass");
  const CircularMask mask = make_mask(x.height, x.width, radius);
  if (mask.all_pass()) return Tensor3(x.channels, x.height, x.width);
  const SpectralField s = to_spectrum(x);
  return from_spectrum(apply_mask(s, mask, true), s.max_amplitude());
}

std::size_t default_bin_count(std::size_t height, std::size_t width) {
  return std::max<std::size_t>(1, std::min(height, width) / 2);
}

std::vector<double> radial_bin_edges(std::size_t bin_count) {
  require(bin_count >= 1, ErrorKind::kOutOfRange, "radial spectrum needs at least one bin");
  const double dr = kMaxRadius / static_cast<double>(bin_count);
  std::vector<double> edges(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) edges[b] = static_cast<double>(b + 1) * dr;
  edges.back() = kMaxRadius;
  return edges;
}

std::size_t radial_bin_of(double radius, const std::vector<double>& upper_edges) {
  // First edge that is >= radius; radii beyond the last edge cannot occur since
  // it equals kMaxRadius, but clamp regardless.
  const auto it = std::lower_bound(upper_edges.begin(), upper_edges.end(), radius);
  if (it == upper_edges.end()) return upper_edges.size() - 1;
  return static_cast<std::size_t>(it - upper_edges.begin());
}

RadialAccumulator::RadialAccumulator(std::size_t height, std::size_t width, std::size_t bin_count)
    : height_(height), width_(width) {
  require(height > 0 && width > 0, ErrorKind::kInvalidArgument, "radial spectrum: empty grid");
  edges_ = radial_bin_edges(bin_count == 0 ? default_bin_count(height, width) : bin_count);
  bin_of_.resize(height * width);
  for (std::size_t u = 0; u < height; ++u) {
    for (std::size_t v = 0; v < width; ++v) {
      bin_of_[u * width + v] = radial_bin_of(normalized_radius(u, v, height, width), edges_);
    }
  }
  sums_.assign(edges_.size(), 0.0);
  counts_.assign(edges_.size(), 0);
}

void RadialAccumulator::add(const SpectralField& s) {
  require(s.centered, ErrorKind::kInvalidArgument, "radial spectrum: field is not centered");
  require(s.height == height_ && s.width == width_, ErrorKind::kInvalidArgument,
          "radial spectrum: field grid does not match accumulator");
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t i = 0; i < s.plane_size(); ++i) {
      const std::size_t b = bin_of_[i];
      sums_[b] += std::abs(s.values[c * s.plane_size() + i]);
      ++counts_[b];
    }
  }
  ++fields_;
}

RadialSpectrum RadialAccumulator::result() const {
  RadialSpectrum out{edges_, std::vector<double>(edges_.size(), 0.0), counts_};
  for (std::size_t b = 0; b < edges_.size(); ++b) {
    if (counts_[b] > 0) out.mean_amplitude[b] = sums_[b] / static_cast<double>(counts_[b]);
  }
  return out;
}

RadialSpectrum radial_spectrum(const SpectralField& s, std::size_t bin_count) {
  RadialAccumulator acc(s.height, s.width, bin_count);
  acc.add(s);
  return acc.result();
}

RadialSpectrum radial_spectrum(const Tensor3& x, std::size_t bin_count) {
  return radial_spectrum(to_spectrum(x), bin_count);
}

double log_spectral_distance(const RadialSpectrum& a, const RadialSpectrum& b) {
  require(a.upper_edges == b.upper_edges, ErrorKind::kInvalidArgument,
          "log_spectral_distance: bin edges differ");
  double sum = 0.0;
  std::size_t shared = 0;
  for (std::size_t i = 0; i < a.bin_count(); ++i) {
    if (a.empty(i) || b.empty(i)) continue;
    const double d = std::log10(a.mean_amplitude[i] + kLogSpectralEpsilon) -
                     std::log10(b.mean_amplitude[i] + kLogSpectralEpsilon);
    sum += d * d;
    ++shared;
  }
  require(shared > 0, ErrorKind::kInvalidArgument, "log_spectral_distance: no shared bins");
  return sum / static_cast<double>(shared);
}

}  // namespace freqwarm::spectral

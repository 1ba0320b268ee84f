#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace freqwarm {

/// Dense real C x H x W tensor, channel-major then row-major.
/// Holds both RGB images (C = 3) and autoencoder latents.
struct Tensor3 {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Tensor3() = default;
  Tensor3(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
      : channels(c), height(h), width(w), values(c * h * w, fill) {}

  std::size_t size() const { return values.size(); }
  std::size_t plane_size() const { return height * width; }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return values[(c * height + y) * width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return values[(c * height + y) * width + x];
  }

  std::span<double> plane(std::size_t c) {
    return {values.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> plane(std::size_t c) const {
    return {values.data() + c * plane_size(), plane_size()};
  }

  bool same_shape(const Tensor3& other) const {
    return channels == other.channels && height == other.height && width == other.width;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

/// Throws kInvalidArgument naming the first NaN/Inf entry as (c, y, x).
void require_finite(const Tensor3& x, const char* what);

double energy(const Tensor3& x);
double max_abs(const Tensor3& x);
Tensor3 operator+(const Tensor3& a, const Tensor3& b);
Tensor3 operator-(const Tensor3& a, const Tensor3& b);
Tensor3 operator*(double s, const Tensor3& a);

}  // namespace freqwarm

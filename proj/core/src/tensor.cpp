#include "freqwarm/tensor.hpp"

#include <cmath>
#include <string>

#include "freqwarm/error.hpp"

namespace freqwarm {

void require_finite(const Tensor3& x, const char* what) {
  require(x.values.size() == x.channels * x.height * x.width, ErrorKind::kInvalidArgument,
          std::string(what) + ": value count does not match shape");
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    if (!std::isfinite(x.values[i])) {
      const std::size_t c = i / x.plane_size();
      const std::size_t y = (i % x.plane_size()) / x.width;
      const std::size_t col = i % x.width;
      fail(ErrorKind::kInvalidArgument, std::string(what) + ": non-finite value at (" +
                                            std::to_string(c) + ", " + std::to_string(y) + ", " +
                                            std::to_string(col) + ")");
    }
  }
}

double energy(const Tensor3& x) {
  double sum = 0.0;
  for (double v : x.values) sum += v * v;
  return sum;
}

double max_abs(const Tensor3& x) {
  double m = 0.0;
  for (double v : x.values) m = std::max(m, std::abs(v));
  return m;
}

namespace {
void require_same_shape(const Tensor3& a, const Tensor3& b) {
  require(a.same_shape(b), ErrorKind::kInvalidArgument, "tensor shape mismatch");
}
}  // namespace

Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
  require_same_shape(a, b);
  Tensor3 out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
  require_same_shape(a, b);
  Tensor3 out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

Tensor3 operator*(double s, const Tensor3& a) {
  Tensor3 out = a;
  for (double& v : out.values) v *= s;
  return out;
}

}  // namespace freqwarm

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace freqwarm::flow {

/// Bias-corrected Adam over a flat parameter vector.
struct AdamOptimizer {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  explicit AdamOptimizer(double lr = 1e-3) : learning_rate(lr) {}
};

void adam_step(AdamOptimizer& opt, std::span<double> params, std::span<const double> grads);

}  // namespace freqwarm::flow

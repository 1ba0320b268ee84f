#include "freqwarm/adam.hpp"

#include <cmath>

#include "freqwarm/error.hpp"

namespace freqwarm::flow {

void adam_step(AdamOptimizer& opt, std::span<double> params, std::span<const double> grads) {
  require(params.size() == grads.size(), ErrorKind::kInvalidArgument,
          "adam_step: parameter and gradient sizes differ");
  if (opt.first_moment.empty() && opt.step == 0) {
    opt.first_moment.assign(params.size(), 0.0);
    opt.second_moment.assign(params.size(), 0.0);
  }
  require(opt.first_moment.size() == params.size(), ErrorKind::kInvalidArgument,
          "adam_step: optimizer state does not match parameters");
  ++opt.step;
  const double t = static_cast<double>(opt.step);
  const double correction1 = 1.0 - std::pow(opt.beta1, t);
  const double correction2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    opt.first_moment[i] = opt.beta1 * opt.first_moment[i] + (1.0 - opt.beta1) * g;
    opt.second_moment[i] = opt.beta2 * opt.second_moment[i] + (1.0 - opt.beta2) * g * g;
    const double m_hat = opt.first_moment[i] / correction1;
    const double v_hat = opt.second_moment[i] / correction2;
    params[i] -= opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
  }
}

}  // namespace freqwarm::flow

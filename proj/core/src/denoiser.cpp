#include "freqwarm/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freqwarm/error.hpp"
#include "freqwarm/random.hpp"

namespace freqwarm::flow {
namespace {

// y = b + sum_i x[i] W[i, :], accumulated in input order.
void affine(const double* weights, const double* bias, const double* x, std::size_t in,
            std::size_t out, double* y) {
  std::copy(bias, bias + out, y);
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = x[i];
    const double* row = weights + i * out;
    for (std::size_t j = 0; j < out; ++j) y[j] += xi * row[j];
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

// Activations of one sample, kept for the backward pass.
struct Trace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = output of layer l
};

void run_forward(const DenoiserParams& p, std::span<const double> zt, double t, Trace& trace) {
  const std::size_t layers = p.layer_count();
  trace.act.resize(layers + 1);
  auto& input = trace.act[0];
  input.resize(p.widths[0]);
  std::copy(zt.begin(), zt.end(), input.begin());
  time_embedding(t, std::span<double>(input).subspan(zt.size()));
  for (std::size_t l = 0; l < layers; ++l) {
    auto& y = trace.act[l + 1];
    y.resize(p.widths[l + 1]);
    affine(p.values.data() + p.weight_offset(l), p.values.data() + p.bias_offset(l),
           trace.act[l].data(), p.widths[l], p.widths[l + 1], y.data());
    if (l + 1 < layers) {
      for (double& v : y) v = std::tanh(v);
    }
  }
}

void require_batch(const DenoiserParams& p, const Batch& b, const char* what) {
  require(b.dim == p.data_dim() && b.values.size() == b.count * b.dim, ErrorKind::kInvalidArgument,
          std::string(what) + ": batch shape does not match the denoiser");
}

}  // namespace

void time_embedding(double t, std::span<double> out) {
  require(out.size() == kTimeEmbeddingDim, ErrorKind::kInvalidArgument,
          "time embedding needs 16 slots");
  double omega = 1.0;
  for (std::size_t k = 0; k < kTimeFrequencies; ++k) {
    out[2 * k] = std::sin(omega * t);
    out[2 * k + 1] = std::cos(omega * t);
    omega *= 2.0;
  }
}

std::size_t default_hidden_width(std::size_t data_dim) {
  return std::min<std::size_t>(4 * (data_dim + kTimeEmbeddingDim), 2048);
}

std::size_t DenoiserParams::weight_offset(std::size_t layer) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += widths[l] * widths[l + 1] + widths[l + 1];
  return offset;
}

std::size_t DenoiserParams::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + widths[layer] * widths[layer + 1];
}

DenoiserParams make_denoiser(std::size_t data_dim, std::size_t hidden_width, std::uint64_t seed) {
  require(data_dim >= 1, ErrorKind::kOutOfRange, "denoiser data dimension must be positive");
  const std::size_t hidden = hidden_width == 0 ? default_hidden_width(data_dim) : hidden_width;
  DenoiserParams p{{data_dim + kTimeEmbeddingDim, hidden, hidden, data_dim}, {}, seed};
  p.values.assign(p.weight_offset(p.layer_count()), 0.0);
  RandomStream rng(seed, stream_tag("denoiser.init"));
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.widths[l]));
    const std::size_t begin = p.weight_offset(l);
    const std::size_t end = p.bias_offset(l);
    for (std::size_t i = begin; i < end; ++i) p.values[i] = scale * rng.normal();
  }
  return p;
}

DenoiserParams zeros_like(const DenoiserParams& shape) {
  DenoiserParams p = shape;
  std::fill(p.values.begin(), p.values.end(), 0.0);
  return p;
}

void validate(const DenoiserParams& p) {
  require(p.widths.size() >= 2, ErrorKind::kFormat, "denoiser needs at least one layer");
  require(p.widths.front() == p.widths.back() + kTimeEmbeddingDim, ErrorKind::kFormat,
          "denoiser input width must be data dim + time embedding");
  require(p.values.size() == p.weight_offset(p.layer_count()), ErrorKind::kFormat,
          "denoiser parameter count does not match layer shapes");
  for (double v : p.values) {
    require(std::isfinite(v), ErrorKind::kNumerical, "denoiser has non-finite parameters");
  }
}

void forward_one(const DenoiserParams& p, std::span<const double> zt, double t,
                 std::span<double> out) {
  require(zt.size() == p.data_dim() && out.size() == p.data_dim(), ErrorKind::kInvalidArgument,
          "forward: sample width does not match the denoiser");
  Trace trace;
  run_forward(p, zt, t, trace);
  std::copy(trace.act.back().begin(), trace.act.back().end(), out.begin());
}

Batch forward(const DenoiserParams& p, const Batch& zt, std::span<const double> t) {
  require_batch(p, zt, "forward");
  require(t.size() == zt.count, ErrorKind::kInvalidArgument, "forward: one time value per sample");
  Batch out{zt.count, zt.dim, std::vector<double>(zt.values.size())};
  for (std::size_t i = 0; i < zt.count; ++i) forward_one(p, zt.row(i), t[i], out.row(i));
  return out;
}

FlowBatch make_flow_batch(Batch z0, Batch z1, std::vector<double> t) {
  require(z0.count == z1.count && z0.dim == z1.dim && t.size() == z0.count,
          ErrorKind::kInvalidArgument, "flow batch: z0, z1 and t disagree in shape");
  FlowBatch b{std::move(z0), std::move(z1), std::move(t), {}, {}};
  const std::size_t n = b.z0.count, d = b.z0.dim;
  b.zt = {n, d, std::vector<double>(n * d)};
  b.v_target = {n, d, std::vector<double>(n * d)};
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = b.t[i];
    for (std::size_t k = 0; k < d; ++k) {
      const double a = b.z0.values[i * d + k];
      const double c = b.z1.values[i * d + k];
      b.zt.values[i * d + k] = (1.0 - ti) * a + ti * c;
      b.v_target.values[i * d + k] = c - a;
    }
  }
  return b;
}

LossGrad loss_and_grad(const DenoiserParams& p, const FlowBatch& batch) {
  require_batch(p, batch.zt, "loss_and_grad");
  require_batch(p, batch.v_target, "loss_and_grad");
  const std::size_t layers = p.layer_count();
  const std::size_t n = batch.zt.count, d = batch.zt.dim;
  const double norm = 1.0 / static_cast<double>(n * d);

  LossGrad out{0.0, std::vector<double>(p.values.size(), 0.0)};
  Trace trace;
  std::vector<double> delta, upstream;
  for (std::size_t s = 0; s < n; ++s) {
    run_forward(p, batch.zt.row(s), batch.t[s], trace);
    const auto target = batch.v_target.row(s);
    const auto& pred = trace.act.back();
    delta.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const double r = pred[k] - target[k];
      out.loss += r * r;
      delta[k] = 2.0 * r * norm;
    }
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = p.widths[l], width = p.widths[l + 1];
      // delta holds dL/d(pre-activation) of layer l.
      const auto& x = trace.act[l];
      double* gw = out.grads.data() + p.weight_offset(l);
      double* gb = out.grads.data() + p.bias_offset(l);
      for (std::size_t j = 0; j < width; ++j) gb[j] += delta[j];
      for (std::size_t i = 0; i < in; ++i) {
        const double xi = x[i];
        double* row = gw + i * width;
        for (std::size_t j = 0; j < width; ++j) row[j] += xi * delta[j];
      }
      if (l == 0) break;
      const double* w = p.values.data() + p.weight_offset(l);
      upstream.resize(in);
      for (std::size_t i = 0; i < in; ++i) {
        const double a = x[i];  // tanh output of layer l-1
        upstream[i] = dot(w + i * width, delta.data(), width) * (1.0 - a * a);
      }
      delta.swap(upstream);
    }
  }
  out.loss *= norm;
  return out;
}

double loss_only(const DenoiserParams& p, const FlowBatch& batch) {
  require_batch(p, batch.zt, "loss_only");
  const Batch pred = forward(p, batch.zt, batch.t);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double r = pred.values[i] - batch.v_target.values[i];
    sum += r * r;
  }
  return sum / static_cast<double>(pred.values.size());
}

}  // namespace freqwarm::flow

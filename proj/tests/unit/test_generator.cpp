#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "checks.hpp"
#include "freqwarm/adam.hpp"
#include "freqwarm/denoiser.hpp"
#include "freqwarm/error.hpp"
#include "freqwarm/flow.hpp"
#include "oracles.hpp"

using namespace freqwarm;
using namespace freqwarm::flow;

namespace {

Batch random_batch(oracle::Lcg& g, std::size_t n, std::size_t d, double scale = 1.0) {
  Batch b{n, d, std::vector<double>(n * d)};
  for (auto& v : b.values) v = scale * g.symmetric();
  return b;
}

// Zero network whose output layer bias is `k`: v(z, t) = k everywhere.
DenoiserParams constant_field(std::size_t d, std::size_t hidden, const std::vector<double>& k) {
  auto p = zeros_like(make_denoiser(d, hidden, 0));
  std::copy(k.begin(), k.end(), p.values.begin() + static_cast<std::ptrdiff_t>(p.bias_offset(2)));
  return p;
}

}  // namespace

TEST_CASE("time embedding interleaves sine and cosine at doubling rates") {
  std::vector<double> e(kTimeEmbeddingDim);
  time_embedding(0.3, e);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(e[2 * k] == doctest::Approx(std::sin(std::ldexp(0.3, static_cast<int>(k)))).epsilon(1e-15));
    CHECK(e[2 * k + 1] == doctest::Approx(std::cos(std::ldexp(0.3, static_cast<int>(k)))).epsilon(1e-15));
  }
  CHECK(default_hidden_width(16) == 128);
  CHECK(default_hidden_width(4096) == 2048);
}

TEST_CASE("denoiser layout") {
  const auto p = make_denoiser(5, 7, 1);
  CHECK(p.widths == std::vector<std::size_t>{21, 7, 7, 5});
  CHECK(p.values.size() == 21 * 7 + 7 + 7 * 7 + 7 + 7 * 5 + 5);
  CHECK(p.bias_offset(0) == 21 * 7);
  CHECK(p.weight_offset(1) == 21 * 7 + 7);
  CHECK(make_denoiser(5, 7, 1) == p);
  CHECK(make_denoiser(5, 7, 2) != p);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t i = p.bias_offset(l); i < p.weight_offset(l + 1); ++i) CHECK(p.values[i] == 0.0);
  }
}

TEST_CASE("zero weights give zero velocity") {
  const auto p = zeros_like(make_denoiser(6, 9, 3));
  oracle::Lcg g(1);
  const auto zt = random_batch(g, 4, 6, 5.0);
  const auto v = forward(p, zt, std::vector<double>{0.0, 0.2, 0.7, 1.0});
  for (double x : v.values) CHECK(x == 0.0);
}

TEST_CASE("two-unit network matches a hand-unrolled evaluation") {
  auto p = make_denoiser(2, 2, 5);
  oracle::Lcg g(5);
  for (auto& v : p.values) v = g.symmetric();
  const double z[2] = {0.4, -1.3};
  const double t = 0.37;

  double in[18] = {z[0], z[1]};
  for (int k = 0; k < 8; ++k) {
    in[2 + 2 * k] = std::sin(std::ldexp(t, k));
    in[3 + 2 * k] = std::cos(std::ldexp(t, k));
  }
  const double* w0 = p.values.data();
  const double* b0 = w0 + 36;
  const double* w1 = b0 + 2;
  const double* b1 = w1 + 4;
  const double* w2 = b1 + 2;
  const double* b2 = w2 + 4;
  double h0[2];
  for (int j = 0; j < 2; ++j) {
    double s = b0[j];
    for (int i = 0; i < 18; ++i) s += in[i] * w0[i * 2 + j];
    h0[j] = std::tanh(s);
  }
  const double h1[2] = {std::tanh(b1[0] + h0[0] * w1[0] + h0[1] * w1[2]),
                        std::tanh(b1[1] + h0[0] * w1[1] + h0[1] * w1[3])};
  const double expect[2] = {b2[0] + h1[0] * w2[0] + h1[1] * w2[2], b2[1] + h1[0] * w2[1] + h1[1] * w2[3]};

  double out[2];
  forward_one(p, std::span<const double>(z, 2), t, std::span<double>(out, 2));
  CHECK(std::abs(out[0] - expect[0]) < 1e-9);
  CHECK(std::abs(out[1] - expect[1]) < 1e-9);
}

TEST_CASE("a batch equals stacked single-sample calls bit for bit") {
  const auto p = make_denoiser(7, 11, 8);
  oracle::Lcg g(8);
  const auto zt = random_batch(g, 5, 7);
  std::vector<double> t = {0.1, 0.5, 0.9, 0.0, 0.33};
  const auto batched = forward(p, zt, t);
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> one(7);
    forward_one(p, zt.row(i), t[i], one);
    for (std::size_t j = 0; j < 7; ++j) CHECK(batched.row(i)[j] == one[j]);
  }
}

TEST_CASE("interpolant endpoints are exact") {
  oracle::Lcg g(2);
  const auto z0 = random_batch(g, 2, 3), z1 = random_batch(g, 2, 3);
  const auto b = make_flow_batch(z0, z1, {0.0, 1.0});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(b.zt.row(0)[j] == z0.row(0)[j]);
    CHECK(b.zt.row(1)[j] == z1.row(1)[j]);
    CHECK(b.v_target.row(0)[j] == z1.row(0)[j] - z0.row(0)[j]);
  }
}

TEST_CASE("a network that already outputs the target has zero loss and gradient") {
  const std::vector<double> k = {0.5, -2.0, 1.25};
  const auto p = constant_field(3, 4, k);
  oracle::Lcg g(3);
  auto z0 = random_batch(g, 4, 3);
  auto z1 = z0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) z1.row(i)[j] += k[j];
  }
  const auto lg = loss_and_grad(p, make_flow_batch(z0, z1, {0.1, 0.4, 0.6, 0.95}));
  CHECK(lg.loss == doctest::Approx(0.0).epsilon(1e-24));
  for (double gr : lg.grads) CHECK(std::abs(gr) < 1e-15);
}

TEST_CASE("doubling every residual quadruples the loss") {
  const auto p = make_denoiser(4, 6, 4);
  oracle::Lcg g(4);
  auto batch = make_flow_batch(random_batch(g, 3, 4), random_batch(g, 3, 4), {0.2, 0.5, 0.8});
  const double base = loss_only(p, batch);
  const auto pred = forward(p, batch.zt, batch.t);
  for (std::size_t i = 0; i < batch.v_target.values.size(); ++i) {
    batch.v_target.values[i] = pred.values[i] + 2.0 * (batch.v_target.values[i] - pred.values[i]);
  }
  CHECK(loss_only(p, batch) == doctest::Approx(4.0 * base).epsilon(1e-12));
  CHECK(loss_and_grad(p, batch).loss == loss_only(p, batch));
}

TEST_CASE("denoiser gradients match central differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto failure = checks::denoiser_gradient_case(seed);
    CHECK_MESSAGE(failure.empty(), failure);
  }
}

TEST_CASE("Adam hand-computed iterates") {
  std::vector<double> w = {3.0, -1.0};
  AdamOptimizer fresh(0.1);
  adam_step(fresh, w, std::vector<double>{0.0, 0.0});
  CHECK(w == std::vector<double>{3.0, -1.0});
  CHECK(fresh.step == 1);

  std::vector<double> x = {0.0};
  AdamOptimizer opt(0.1);
  adam_step(opt, x, std::vector<double>{1.0});
  CHECK(std::abs(x[0] - (-0.1 / (1.0 + 1e-8))) < 1e-12);
  adam_step(opt, x, std::vector<double>{1.0});
  // m_hat = v_hat = 1 again on the second step, so the update repeats.
  CHECK(std::abs(x[0] - (-0.2 / (1.0 + 1e-8))) < 1e-12);
}

TEST_CASE("sampling a zero field returns the initial noise") {
  const auto p = zeros_like(make_denoiser(4, 5, 0));
  const auto out = sample(p, 6, 17, 99);
  CHECK(out.values == initial_noise(6, 4, 99).values);
}

TEST_CASE("sampling a constant field shifts the noise by the constant") {
  const std::vector<double> k = {0.25, -1.5, 3.0};
  const auto p = constant_field(3, 4, k);
  for (std::size_t steps : {1, 7, 50}) {
    const auto out = sample(p, 4, steps, 5);
    const auto z0 = initial_noise(4, 3, 5);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(out.row(i)[j] - (z0.row(i)[j] + k[j])) < 1e-9);
    }
  }
  CHECK(sample(p, 4, 7, 5).values == sample(p, 4, 7, 5).values);
  CHECK_THROWS_AS(sample(p, 4, 0, 5), Error);
}

TEST_CASE("standardization round trip") {
  oracle::Lcg g(6);
  std::vector<Tensor3> latents;
  for (int i = 0; i < 5; ++i) latents.push_back(3.0 * oracle::random_tensor(g, 3, 2, 2) + Tensor3(3, 2, 2, 7.0));
  const auto stats = fit_standardizer(latents);
  REQUIRE(stats.mean.size() == 3);
  for (double m : stats.mean) CHECK(m == doctest::Approx(7.0).epsilon(0.2));
  for (const auto& z : latents) {
    CHECK(checks::relative_max_error(stats.destandardize(stats.standardize(z)).values, z.values) < 1e-6);
  }
  const auto flat = fit_standardizer({Tensor3(2, 1, 1, 4.0), Tensor3(2, 1, 1, 4.0)});
  CHECK(flat.stddev == std::vector<double>{1.0, 1.0});
}

TEST_CASE("zero training steps leave parameters unchanged") {
  const auto init = make_denoiser(2, 8, 1);
  const std::vector<Tensor3> latents = {Tensor3(2, 1, 1, 1.0), Tensor3(2, 1, 1, -1.0)};
  FlowTrainConfig cfg;
  cfg.steps = 0;
  const auto result = train_flow(init, latents, cfg);
  CHECK(result.params == init);
  CHECK(result.loss_trace.empty());
}

TEST_CASE("two-point toy flow recovers the data mean") {
  Tensor3 a(2, 1, 1), b(2, 1, 1);
  a.values = {1.0, -1.0};
  b.values = {-1.0, 3.0};
  const std::vector<Tensor3> latents = {a, b};
  FlowTrainConfig cfg;
  cfg.steps = 5000;
  cfg.seed = 0;
  Standardizer stats;
  const auto result = train_flow(make_denoiser(2, 0, 0), latents, cfg, &stats);
  for (double l : result.loss_trace) REQUIRE(std::isfinite(l));
  CHECK(result.loss_trace.back() < result.loss_trace.front());

  const FlowModel model{result.params, stats, 2, 1, 1};
  const auto samples = generate_latents(model, 512, 50, 1);
  double m0 = 0.0, m1 = 0.0;
  for (const auto& s : samples) {
    m0 += s.values[0];
    m1 += s.values[1];
  }
  CHECK(std::abs(m0 / 512 - 0.0) < 0.1);
  CHECK(std::abs(m1 / 512 - 1.0) < 0.1);

  const auto again = train_flow(make_denoiser(2, 0, 0), latents, cfg);
  CHECK(again.params == result.params);
  CHECK(again.loss_trace == result.loss_trace);
}

TEST_CASE("schedule chooses the target source per step") {
  Tensor3 a(1, 1, 1, 1.0), b(1, 1, 1, -1.0);
  const std::vector<Tensor3> first = {a, b}, second = {b, a};
  const std::vector<TargetSource> sources = {{"first", &first}, {"second", &second}};
  FlowTrainConfig cfg;
  cfg.steps = 6;
  cfg.batch_size = 2;
  const auto stats = fit_standardizer(first);
  const auto init = make_denoiser(1, 4, 0);
  const auto r = train_flow(init, stats, sources, [](std::size_t s) { return s % 2; }, cfg);
  CHECK(r.source_trace == std::vector<std::size_t>{0, 1, 0, 1, 0, 1});
  const auto only_first = train_flow(init, stats, sources, [](std::size_t) { return 0; }, cfg);
  CHECK(only_first.params == train_flow(init, first, cfg).params);
  CHECK_THROWS_AS(train_flow(init, stats, sources, [](std::size_t) { return 2; }, cfg), Error);
}

TEST_CASE("flow model save and load") {
  FlowModel model{make_denoiser(2, 3, 4), Standardizer{{0.5, -1.0}, {2.0, 0.25}}, 2, 1, 1};
  const auto dir = std::filesystem::temp_directory_path() / "freqwarm_unit" / "flow";
  std::filesystem::remove_all(dir);
  save(model, dir);
  const auto back = load(dir);
  CHECK(back.channels == 2);
  CHECK(back.denoiser.widths == model.denoiser.widths);
  CHECK(back.stats == model.stats);
  for (std::size_t i = 0; i < model.denoiser.values.size(); ++i) {
    CHECK(back.denoiser.values[i] == static_cast<double>(static_cast<float>(model.denoiser.values[i])));
  }
}

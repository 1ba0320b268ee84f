#include <doctest.h>

#include <filesystem>
#include <set>

#include "checks.hpp"
#include "freqwarm/autoencoder.hpp"
#include "freqwarm/dataset.hpp"
#include "freqwarm/error.hpp"
#include "oracles.hpp"

using namespace freqwarm;
using namespace freqwarm::autoencoder;

namespace {

AEParams identity_f1() {
  AEParams p{Matrix::identity(3), Matrix::identity(3), AEConfig{1, 3, Variant::kTrainableLinear, 0}};
  return p;
}

AEParams dct(std::size_t f, std::size_t c) { return init(AEConfig{f, c, Variant::kAnalyticDct, 0}); }

std::vector<Tensor3> random_images(std::uint64_t seed, std::size_t n, std::size_t h, std::size_t w) {
  oracle::Lcg g(seed);
  std::vector<Tensor3> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(oracle::random_tensor(g, 3, h, w));
  return out;
}

}  // namespace

TEST_CASE("zigzag order visits every frequency once, low first") {
  const auto order = zigzag_order(4);
  REQUIRE(order.size() == 16);
  CHECK(order[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(order[1] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(order[2] == std::pair<std::size_t, std::size_t>{1, 0});
  CHECK(order[3] == std::pair<std::size_t, std::size_t>{2, 0});
  CHECK(order[15] == std::pair<std::size_t, std::size_t>{3, 3});
  std::set<std::pair<std::size_t, std::size_t>> seen(order.begin(), order.end());
  CHECK(seen.size() == 16);
  for (std::size_t i = 1; i < order.size(); ++i) {
    CHECK(order[i].first + order[i].second >= order[i - 1].first + order[i - 1].second);
  }
}

TEST_CASE("identity autoencoder at f = 1 copies the image") {
  const auto x = random_images(1, 1, 5, 4)[0];
  CHECK(encode(identity_f1(), x) == x);
  CHECK(decode(identity_f1(), x) == x);
}

TEST_CASE("analytic rows are orthonormal and decode is the transpose") {
  for (std::size_t f : {1, 2, 4}) {
    const auto p = dct(f, 3 * f * f);
    const Matrix& e = p.encode_matrix;
    CHECK(p.decode_matrix == e.transposed());
    for (std::size_t i = 0; i < e.rows; ++i) {
      for (std::size_t j = 0; j < e.rows; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < e.cols; ++k) dot += e(i, k) * e(j, k);
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
  }
}

TEST_CASE("complete analytic basis reconstructs exactly") {
  const auto p = dct(4, 48);
  const auto x = random_images(2, 1, 8, 12)[0];
  CHECK(checks::relative_max_error(decode(p, encode(p, x)).values, x.values) < 1e-6);
}

TEST_CASE("constant image excites only the three DC channels") {
  const auto p = dct(4, 16);
  Tensor3 x(3, 8, 8);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t xx = 0; xx < 8; ++xx) {
      x.at(0, y, xx) = 0.3;
      x.at(1, y, xx) = -0.6;
      x.at(2, y, xx) = 0.9;
    }
  }
  const auto z = encode(p, x);
  for (std::size_t c = 0; c < z.channels; ++c) {
    for (double v : z.plane(c)) {
      if (c < 3) {
        CHECK(std::abs(v) > 0.1);
      } else {
        CHECK(std::abs(v) < 1e-12);
      }
    }
  }
}

TEST_CASE("encode matches a per-patch matrix product") {
  AEConfig cfg{4, 8, Variant::kTrainableLinear, 9};
  const auto p = init(cfg);
  const auto x = random_images(3, 1, 8, 12)[0];
  const auto z = encode(p, x);
  REQUIRE(z.channels == 8);
  REQUIRE(z.height == 2);
  REQUIRE(z.width == 3);
  for (std::size_t py = 0; py < 2; ++py) {
    for (std::size_t px = 0; px < 3; ++px) {
      std::vector<double> patch;
      for (std::size_t color = 0; color < 3; ++color) {
        for (std::size_t r = 0; r < 4; ++r) {
          for (std::size_t col = 0; col < 4; ++col) patch.push_back(x.at(color, 4 * py + r, 4 * px + col));
        }
      }
      for (std::size_t c = 0; c < 8; ++c) {
        double expect = 0.0;
        for (std::size_t k = 0; k < 48; ++k) expect += p.encode_matrix(c, k) * patch[k];
        CHECK(std::abs(z.at(c, py, px) - expect) < 1e-12);
      }
    }
  }
}

TEST_CASE("decode of zero is zero and decode is linear") {
  const auto p = init(AEConfig{2, 5, Variant::kTrainableLinear, 4});
  CHECK(decode(p, Tensor3(5, 3, 3)) == Tensor3(3, 6, 6));
  oracle::Lcg g(8);
  const auto z1 = oracle::random_tensor(g, 5, 3, 3), z2 = oracle::random_tensor(g, 5, 3, 3);
  const auto lhs = decode(p, 2.5 * z1 + -0.75 * z2);
  const auto rhs = 2.5 * decode(p, z1) + -0.75 * decode(p, z2);
  CHECK(checks::relative_max_error(lhs.values, rhs.values) < 1e-6);
  const auto x1 = random_images(5, 1, 6, 6)[0], x2 = random_images(6, 1, 6, 6)[0];
  const auto elhs = encode(p, 2.0 * x1 + x2), erhs = 2.0 * encode(p, x1) + encode(p, x2);
  CHECK(checks::relative_max_error(elhs.values, erhs.values) < 1e-6);
}

TEST_CASE("directional derivatives of encode and decode match central differences") {
  const auto p = init(AEConfig{2, 4, Variant::kTrainableLinear, 12});
  oracle::Lcg g(12);
  const auto x = oracle::random_tensor(g, 3, 4, 4), dx = oracle::random_tensor(g, 3, 4, 4);
  const auto jvp = encode(p, dx);
  const auto fd = (1.0 / 2e-4) * (encode(p, x + 1e-4 * dx) - encode(p, x - 1e-4 * dx));
  CHECK(checks::relative_max_error(fd.values, jvp.values) < 1e-4);
  const auto z = oracle::random_tensor(g, 4, 2, 2), dz = oracle::random_tensor(g, 4, 2, 2);
  const auto djvp = decode(p, dz);
  const auto dfd = (1.0 / 2e-4) * (decode(p, z + 1e-4 * dz) - decode(p, z - 1e-4 * dz));
  CHECK(checks::relative_max_error(dfd.values, djvp.values) < 1e-4);
}

TEST_CASE("truncated analytic basis error is non-increasing in c") {
  const auto images = random_images(10, 4, 16, 16);
  double previous = 1e300;
  for (std::size_t c : {4, 8, 16, 32}) {
    const double mse = reconstruction_mse(dct(4, c), images);
    CHECK(mse <= previous);
    previous = mse;
  }
}

TEST_CASE("indivisible extents are rejected with a padding hint") {
  const auto p = dct(4, 8);
  try {
    encode(p, Tensor3(3, 10, 8));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
    CHECK(std::string(e.what()).find("pad to 12") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(init(AEConfig{2, 13, Variant::kAnalyticDct, 0}), Error);
  CHECK_THROWS_AS(init(AEConfig{0, 1, Variant::kTrainableLinear, 0}), Error);
  CHECK(init(AEConfig{2, 5, Variant::kTrainableLinear, 3}) == init(AEConfig{2, 5, Variant::kTrainableLinear, 3}));
  CHECK(init(AEConfig{2, 5, Variant::kTrainableLinear, 3}) != init(AEConfig{2, 5, Variant::kTrainableLinear, 4}));
}

TEST_CASE("second-moment loss equals the pixel reconstruction error") {
  const auto images = random_images(13, 3, 8, 8);
  const auto p = init(AEConfig{4, 6, Variant::kTrainableLinear, 1});
  const auto lg = reconstruction_loss_and_grad(p, patch_second_moment(images, 4));
  CHECK(lg.loss == doctest::Approx(reconstruction_mse(p, images)).epsilon(1e-12));
}

TEST_CASE("reconstruction gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto failure = checks::autoencoder_gradient_case(seed);
    CHECK_MESSAGE(failure.empty(), failure);
  }
}

TEST_CASE("training a complete trainable autoencoder on blobs") {
  data::DatasetSpec spec;
  spec.kind = data::DatasetKind::kBlobs;
  spec.count = 256;
  const auto images = data::generate(spec);
  AEConfig cfg{4, 48, Variant::kTrainableLinear, 0};
  const auto result = train_ae(cfg, images, 2000, 1e-3);
  REQUIRE(result.loss_trace.size() == 2000);
  for (double l : result.loss_trace) CHECK(std::isfinite(l));
  CHECK(reconstruction_mse(result.params, images) < 1e-3);
  CHECK(result.loss_trace.back() < result.loss_trace.front());
}

TEST_CASE("zero training steps return the initialisation") {
  const auto images = random_images(14, 2, 4, 4);
  AEConfig cfg{2, 3, Variant::kTrainableLinear, 6};
  const auto result = train_ae(cfg, images, 0, 1e-3);
  CHECK(result.params == init(cfg));
  CHECK(result.loss_trace.empty());
  CHECK_THROWS_AS(train_ae(AEConfig{2, 3, Variant::kAnalyticDct, 0}, images, 1, 1e-3), Error);
}

TEST_CASE("save and load round trip") {
  const auto p = init(AEConfig{2, 7, Variant::kTrainableLinear, 21});
  const auto dir = std::filesystem::temp_directory_path() / "freqwarm_unit" / "ae";
  std::filesystem::remove_all(dir);
  save(p, dir);
  const auto back = load(dir);
  CHECK(back.config == p.config);
  for (std::size_t i = 0; i < p.encode_matrix.data.size(); ++i) {
    CHECK(back.encode_matrix.data[i] == static_cast<double>(static_cast<float>(p.encode_matrix.data[i])));
  }
  try {
    load(dir / "nowhere");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingPath);
  }
}

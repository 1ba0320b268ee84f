#include "freqwarm/autoencoder.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "freqwarm/adam.hpp"
#include "freqwarm/error.hpp"
#include "freqwarm/random.hpp"
#include "freqwarm/tensor_io.hpp"

namespace freqwarm::autoencoder {
namespace {

void require_divisible(std::size_t extent, std::size_t f, const char* axis) {
  if (extent % f != 0) {
    const std::size_t padded = (extent / f + 1) * f;
    fail(ErrorKind::kInvalidArgument,
         std::string("image ") + axis + " " + std::to_string(extent) + " is not divisible by f=" +
             std::to_string(f) + "; pad to " + std::to_string(padded));
  }
}

void orthonormalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double* row = m.data.data() + r * m.cols;
    for (std::size_t prev = 0; prev < r; ++prev) {
      const double* other = m.data.data() + prev * m.cols;
      double dot = 0.0;
      for (std::size_t k = 0; k < m.cols; ++k) dot += row[k] * other[k];
      for (std::size_t k = 0; k < m.cols; ++k) row[k] -= dot * other[k];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < m.cols; ++k) norm += row[k] * row[k];
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < m.cols; ++k) row[k] /= norm;
  }
}

std::vector<double> flatten(const Matrix& a, const Matrix& b) {
  std::vector<double> flat(a.data);
  flat.insert(flat.end(), b.data.begin(), b.data.end());
  return flat;
}

void unflatten(const std::vector<double>& flat, Matrix& a, Matrix& b) {
  std::copy(flat.begin(), flat.begin() + a.data.size(), a.data.begin());
  std::copy(flat.begin() + a.data.size(), flat.end(), b.data.begin());
}

Matrix from_tensor(const io::TensorN& t, std::size_t rows, std::size_t cols, const char* what) {
  require(t.dims.size() == 2 && t.dims[0] == rows && t.dims[1] == cols, ErrorKind::kFormat,
          std::string(what) + " has the wrong shape for the header config");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = t.data[i];
  return m;
}

io::TensorN to_tensor(const Matrix& m) {
  return {{static_cast<std::uint32_t>(m.rows), static_cast<std::uint32_t>(m.cols)},
          std::vector<float>(m.data.begin(), m.data.end())};
}

}  // namespace

std::string_view to_string(Variant v) {
  return v == Variant::kAnalyticDct ? "analytic_dct" : "trainable_linear";
}

Variant parse_variant(std::string_view text) {
  if (text == "analytic_dct") return Variant::kAnalyticDct;
  if (text == "trainable_linear") return Variant::kTrainableLinear;
  fail(ErrorKind::kInvalidArgument, "unknown autoencoder variant '" + std::string(text) + "'");
}

void validate(const AEConfig& config) {
  require(config.compression >= 1, ErrorKind::kOutOfRange, "compression f must be positive");
  require(config.channels >= 1, ErrorKind::kOutOfRange, "channel count c must be positive");
  if (config.variant == Variant::kAnalyticDct) {
    require(config.channels <= config.patch_dim(), ErrorKind::kOutOfRange,
            "analytic_dct needs c <= 3 f^2 (" + std::to_string(config.patch_dim()) + "), got c=" +
                std::to_string(config.channels));
  }
}

std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t f) {
  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(f * f);
  for (std::size_t s = 0; s + 1 < 2 * f; ++s) {
    const std::size_t lo = s < f ? 0 : s - f + 1;
    const std::size_t hi = s < f ? s : f - 1;
    if (s % 2 == 0) {
      for (std::size_t r = hi + 1; r-- > lo;) order.emplace_back(r, s - r);
    } else {
      for (std::size_t r = lo; r <= hi; ++r) order.emplace_back(r, s - r);
    }
  }
  return order;
}

std::vector<double> dct_basis(std::size_t p, std::size_t q, std::size_t f) {
  const double n = static_cast<double>(f);
  const double ap = p == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  const double aq = q == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  std::vector<double> basis(f * f);
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      basis[i * f + j] =
          ap * aq * std::cos(std::numbers::pi * (2.0 * i + 1.0) * p / (2.0 * n)) *
          std::cos(std::numbers::pi * (2.0 * j + 1.0) * q / (2.0 * n));
    }
  }
  return basis;
}

AEParams init(const AEConfig& config) {
  validate(config);
  const std::size_t f = config.compression;
  const std::size_t dim = config.patch_dim();
  AEParams p{Matrix(config.channels, dim), Matrix(dim, config.channels), config};
  if (config.variant == Variant::kAnalyticDct) {
    const auto order = zigzag_order(f);
    for (std::size_t row = 0; row < config.channels; ++row) {
      const auto [fp, fq] = order[row / 3];
      const std::size_t color = row % 3;
      const auto basis = dct_basis(fp, fq, f);
      for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = 0; j < f; ++j)
          p.encode_matrix(row, patch_index(color, i, j, f)) = basis[i * f + j];
    }
    orthonormalize_rows(p.encode_matrix);
    p.decode_matrix = p.encode_matrix.transposed();
    return p;
  }
  RandomStream rng(config.seed, stream_tag("autoencoder.init"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : p.encode_matrix.data) v = scale * rng.normal();
  for (double& v : p.decode_matrix.data) v = scale * rng.normal();
  return p;
}

Tensor3 encode(const AEParams& p, const Tensor3& x) {
  const std::size_t f = p.config.compression;
  require(x.channels == 3, ErrorKind::kInvalidArgument, "encode: expected an RGB image");
  require_divisible(x.height, f, "height");
  require_divisible(x.width, f, "width");
  const std::size_t hz = x.height / f;
  const std::size_t wz = x.width / f;
  const std::size_t dim = p.config.patch_dim();
  Tensor3 z(p.config.channels, hz, wz);
  std::vector<double> patch(dim);
  for (std::size_t by = 0; by < hz; ++by) {
    for (std::size_t bx = 0; bx < wz; ++bx) {
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f; ++i)
          for (std::size_t j = 0; j < f; ++j)
            patch[patch_index(c, i, j, f)] = x.at(c, by * f + i, bx * f + j);
      for (std::size_t k = 0; k < p.config.channels; ++k) {
        const double* row = p.encode_matrix.data.data() + k * dim;
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) acc += row[d] * patch[d];
        z.at(k, by, bx) = acc;
      }
    }
  }
  return z;
}

Tensor3 decode(const AEParams& p, const Tensor3& z) {
  const std::size_t f = p.config.compression;
  require(z.channels == p.config.channels, ErrorKind::kInvalidArgument,
          "decode: latent has " + std::to_string(z.channels) + " channels, model expects " +
              std::to_string(p.config.channels));
  const std::size_t dim = p.config.patch_dim();
  Tensor3 x(3, z.height * f, z.width * f);
  std::vector<double> patch(dim);
  for (std::size_t by = 0; by < z.height; ++by) {
    for (std::size_t bx = 0; bx < z.width; ++bx) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double* row = p.decode_matrix.data.data() + d * p.config.channels;
        double acc = 0.0;
        for (std::size_t k = 0; k < p.config.channels; ++k) acc += row[k] * z.at(k, by, bx);
        patch[d] = acc;
      }
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f; ++i)
          for (std::size_t j = 0; j < f; ++j)
            x.at(c, by * f + i, bx * f + j) = patch[patch_index(c, i, j, f)];
    }
  }
  return x;
}

double reconstruction_mse(const AEParams& p, const std::vector<Tensor3>& images) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& x : images) {
    const Tensor3 r = decode(p, encode(p, x));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = r.values[i] - x.values[i];
      sum += d * d;
    }
    count += x.size();
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

Matrix patch_second_moment(const std::vector<Tensor3>& images, std::size_t f) {
  const std::size_t dim = 3 * f * f;
  Matrix s(dim, dim);
  std::vector<double> patch(dim);
  std::size_t patches = 0;
  for (const auto& x : images) {
    require(x.channels == 3, ErrorKind::kInvalidArgument, "expected RGB images");
    require_divisible(x.height, f, "height");
    require_divisible(x.width, f, "width");
    for (std::size_t by = 0; by < x.height / f; ++by) {
      for (std::size_t bx = 0; bx < x.width / f; ++bx) {
        for (std::size_t c = 0; c < 3; ++c)
          for (std::size_t i = 0; i < f; ++i)
            for (std::size_t j = 0; j < f; ++j)
              patch[patch_index(c, i, j, f)] = x.at(c, by * f + i, bx * f + j);
        for (std::size_t a = 0; a < dim; ++a) {
          double* row = s.data.data() + a * dim;
          for (std::size_t b = 0; b < dim; ++b) row[b] += patch[a] * patch[b];
        }
        ++patches;
      }
    }
  }
  require(patches > 0, ErrorKind::kInvalidArgument, "no patches to train on");
  for (double& v : s.data) v /= static_cast<double>(patches);
  return s;
}

LossAndGrad reconstruction_loss_and_grad(const AEParams& p, const Matrix& second_moment) {
  const std::size_t dim = p.config.patch_dim();
  Matrix residual = matmul(p.decode_matrix, p.encode_matrix);  // D E
  for (std::size_t i = 0; i < dim; ++i) residual(i, i) -= 1.0;
  const Matrix rs = matmul(residual, second_moment);  // R S
  double trace = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < dim; ++k) trace += rs(i, k) * residual(i, k);
  const double scale = 2.0 / static_cast<double>(dim);
  LossAndGrad out;
  out.loss = trace / static_cast<double>(dim);
  // S is symmetric, so d/dD tr(R S R^T) = 2 R S E^T and d/dE = 2 D^T R S.
  out.grad_decode = matmul(rs, p.encode_matrix.transposed());
  out.grad_encode = matmul(p.decode_matrix.transposed(), rs);
  for (double& v : out.grad_decode.data) v *= scale;
  for (double& v : out.grad_encode.data) v *= scale;
  return out;
}

TrainResult train_ae(const AEConfig& config, const std::vector<Tensor3>& images, std::size_t steps,
                     double learning_rate) {
  require(config.variant == Variant::kTrainableLinear, ErrorKind::kInvalidArgument,
          "train_ae needs the trainable_linear variant");
  require(learning_rate > 0.0, ErrorKind::kOutOfRange, "learning rate must be positive");
  TrainResult result{init(config), {}};
  if (steps == 0) return result;
  const Matrix s = patch_second_moment(images, config.compression);

  AEParams& p = result.params;
  flow::AdamOptimizer opt(learning_rate);
  std::vector<double> flat = flatten(p.encode_matrix, p.decode_matrix);
  result.loss_trace.reserve(steps);
  for (std::size_t step = 0; step < steps; ++step) {
    const LossAndGrad lg = reconstruction_loss_and_grad(p, s);
    if (!std::isfinite(lg.loss)) {
      fail(ErrorKind::kNumerical, "train_ae diverged: non-finite loss at step " +
                                      std::to_string(step));
    }
    result.loss_trace.push_back(lg.loss);
    const std::vector<double> grads = flatten(lg.grad_encode, lg.grad_decode);
    flow::adam_step(opt, flat, grads);
    unflatten(flat, p.encode_matrix, p.decode_matrix);
  }
  return result;
}

void save(const AEParams& p, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream header(dir / "ae.txt", std::ios::trunc);
  require(static_cast<bool>(header), ErrorKind::kIo, "cannot write " + (dir / "ae.txt").string());
  header << "variant=" << to_string(p.config.variant) << "\n"
         << "compression=" << p.config.compression << "\n"
         << "channels=" << p.config.channels << "\n"
         << "seed=" << p.config.seed << "\n";
  io::write_tensor(to_tensor(p.encode_matrix), dir / "encode.fwt");
  io::write_tensor(to_tensor(p.decode_matrix), dir / "decode.fwt");
}

AEParams load(const std::filesystem::path& dir) {
  const auto header_path = dir / "ae.txt";
  require(std::filesystem::exists(header_path), ErrorKind::kMissingPath,
          "no autoencoder header: " + header_path.string());
  std::ifstream header(header_path);
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(header, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"variant", "compression", "channels", "seed"}) {
    require(fields.count(key) != 0, ErrorKind::kFormat,
            std::string("autoencoder header lacks '") + key + "'");
  }
  AEConfig config;
  try {
    config.variant = parse_variant(fields["variant"]);
    config.compression = std::stoul(fields["compression"]);
    config.channels = std::stoul(fields["channels"]);
    config.seed = std::stoull(fields["seed"]);
  } catch (const std::logic_error&) {
    fail(ErrorKind::kFormat, "malformed autoencoder header: " + header_path.string());
  }
  validate(config);
  AEParams p{from_tensor(io::read_tensor(dir / "encode.fwt"), config.channels, config.patch_dim(),
                         "encode.fwt"),
             from_tensor(io::read_tensor(dir / "decode.fwt"), config.patch_dim(), config.channels,
                         "decode.fwt"),
             config};
  return p;
}

}  // namespace freqwarm::autoencoder

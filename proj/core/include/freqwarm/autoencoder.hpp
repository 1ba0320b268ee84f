#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "freqwarm/matrix.hpp"
#include "freqwarm/tensor.hpp"

namespace freqwarm::autoencoder {

enum class Variant { kAnalyticDct, kTrainableLinear };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

/// "f<compression>c<channels>": each f x f RGB patch maps to one latent pixel
/// with `channels` channels.
struct AEConfig {
  std::size_t compression = 4;
  std::size_t channels = 32;
  Variant variant = Variant::kTrainableLinear;
  std::uint64_t seed = 0;

  std::size_t patch_dim() const { return 3 * compression * compression; }
  friend bool operator==(const AEConfig&, const AEConfig&) = default;
};

void validate(const AEConfig& config);

struct AEParams {
  Matrix encode_matrix;  // channels x patch_dim
  Matrix decode_matrix;  // patch_dim x channels
  AEConfig config;

  friend bool operator==(const AEParams&, const AEParams&) = default;
};

/// Patch vector index of (color, row, col) inside an f x f patch.
inline std::size_t patch_index(std::size_t color, std::size_t row, std::size_t col, std::size_t f) {
  return (color * f + row) * f + col;
}

/// JPEG zigzag order of the f x f DCT frequencies as (row, col) pairs.
std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t f);

/// Orthonormal 2D DCT-II basis function (p, q) sampled on an f x f patch.
std::vector<double> dct_basis(std::size_t p, std::size_t q, std::size_t f);

AEParams init(const AEConfig& config);

/// Splits x into f x f patches and maps each through encode_matrix.
Tensor3 encode(const AEParams& p, const Tensor3& x);
Tensor3 decode(const AEParams& p, const Tensor3& z);

/// Mean squared reconstruction error over every pixel of every image.
double reconstruction_mse(const AEParams& p, const std::vector<Tensor3>& images);

/// Second-moment matrix (1/N) sum p p^T over every patch of every image,
/// accumulated in image, row, column order.
Matrix patch_second_moment(const std::vector<Tensor3>& images, std::size_t f);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad_encode;
  Matrix grad_decode;
};

/// Reconstruction MSE and its exact gradient written in terms of the patch
/// second moment S: loss = tr(R S R^T) / P with R = D E - I.
LossAndGrad reconstruction_loss_and_grad(const AEParams& p, const Matrix& second_moment);

struct TrainResult {
  AEParams params;
  std::vector<double> loss_trace;  // loss before each update
};

/// Full-batch Adam on the reconstruction MSE. Requires kTrainableLinear.
TrainResult train_ae(const AEConfig& config, const std::vector<Tensor3>& images, std::size_t steps,
                     double learning_rate);

/// Header file ae.txt plus encode.fwt / decode.fwt.
void save(const AEParams& p, const std::filesystem::path& dir);
AEParams load(const std::filesystem::path& dir);

}  // namespace freqwarm::autoencoder

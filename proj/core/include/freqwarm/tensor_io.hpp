#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "freqwarm/tensor.hpp"

namespace freqwarm::io {

/// N-dimensional float32 tensor as stored on disk.
struct TensorN {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
  friend bool operator==(const TensorN&, const TensorN&) = default;
};

/// TensorFile layout, all fields little-endian:
///   "FWT1" | u32 version = 1 | u32 ndim | ndim x u32 dims | float32 payload
inline constexpr char kTensorMagic[4] = {'F', 'W', 'T', '1'};
inline constexpr std::uint32_t kTensorVersion = 1;

std::vector<std::uint8_t> encode_tensor(const TensorN& t);
TensorN decode_tensor(const std::vector<std::uint8_t>& bytes);

void write_tensor(const TensorN& t, const std::filesystem::path& path);
TensorN read_tensor(const std::filesystem::path& path);

TensorN to_tensor_n(const Tensor3& x);
/// Accepts ndim 3 (C, H, W) or ndim 4 with a leading 1.
Tensor3 to_tensor3(const TensorN& t);

/// Stacks equally shaped tensors into dims (N, C, H, W).
TensorN stack(const std::vector<Tensor3>& items);
std::vector<Tensor3> unstack(const TensorN& t);

/// 8-bit RGB PNG. Loading maps v -> v / 127.5 - 1; saving maps back with
/// round((v + 1) * 127.5) clamped to [0, 255].
Tensor3 load_image(const std::filesystem::path& path);
void save_image(const Tensor3& x, const std::filesystem::path& path);

std::uint8_t quantize_pixel(double v);
inline double dequantize_pixel(std::uint8_t p) { return static_cast<double>(p) / 127.5 - 1.0; }

}  // namespace freqwarm::io

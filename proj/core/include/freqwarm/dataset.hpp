#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freqwarm/tensor.hpp"

namespace freqwarm::data {

enum class DatasetKind {
  kImageDir,
  kBandlimited,  // white noise low-passed at `cutoff`
  kBlobs,        // sums of Gaussian bumps on the torus
  kChecker,      // diamond checker with fundamental 1/period on both axes
  kMixture,      // even indices bandlimited, odd indices blobs
};

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view text);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kBlobs;
  std::size_t count = 64;
  std::size_t height = 32;
  std::size_t width = 32;
  std::uint64_t seed = 0;
  double cutoff = 0.2;
  std::size_t blob_count = 6;
  double blob_scale = 0.08;
  std::size_t checker_period = 8;
  std::filesystem::path path;  // kImageDir only
};

void validate(const DatasetSpec& spec);

/// Image `index` of a synthetic dataset. Each image draws from its own Philox
/// stream (stream id = index), so any subset can be generated independently.
Tensor3 generate_one(const DatasetSpec& spec, std::size_t index);

/// All images of `spec`; for kImageDir, the first `count` PNGs in name order.
std::vector<Tensor3> generate(const DatasetSpec& spec);

/// "000000.png", "000001.png", ... plus images.fwt holding the exact values
/// as an (N, 3, H, W) tensor.
void write_dataset_dir(const std::vector<Tensor3>& images, const std::filesystem::path& dir);

/// Reads images.fwt when present, otherwise every *.png in name order.
std::vector<Tensor3> read_dataset_dir(const std::filesystem::path& dir,
                                      std::optional<std::size_t> limit = std::nullopt);

}  // namespace freqwarm::data

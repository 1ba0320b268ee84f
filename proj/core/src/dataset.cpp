#include "freqwarm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "freqwarm/error.hpp"
#include "freqwarm/random.hpp"
#include "freqwarm/spectral.hpp"
#include "freqwarm/tensor_io.hpp"

namespace freqwarm::data {
namespace {

void rescale_into_unit_range(Tensor3& x) {
  const double m = max_abs(x);
  if (m > 1.0) {
    for (double& v : x.values) v /= m;
  }
}

Tensor3 make_bandlimited(const DatasetSpec& spec, RandomStream& rng) {
  Tensor3 noise(3, spec.height, spec.width);
  for (double& v : noise.values) v = rng.normal();
  Tensor3 x = spectral::lowpass(noise, spec.cutoff);
  const double m = max_abs(x);
  if (m > 0.0) {
    for (double& v : x.values) v /= m;
  }
  return x;
}

Tensor3 make_blobs(const DatasetSpec& spec, RandomStream& rng) {
  Tensor3 x(3, spec.height, spec.width);
  const double h = static_cast<double>(spec.height);
  const double w = static_cast<double>(spec.width);
  const double base_sigma = spec.blob_scale * std::min(h, w);
  for (std::size_t b = 0; b < spec.blob_count; ++b) {
    const double cy = rng.uniform() * h;
    const double cx = rng.uniform() * w;
    const double sigma = base_sigma * (0.5 + rng.uniform());
    double amplitude[3];
    for (double& a : amplitude) a = 2.0 * rng.uniform() - 1.0;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t y = 0; y < spec.height; ++y) {
      double dy = std::abs(static_cast<double>(y) - cy);
      dy = std::min(dy, h - dy);
      for (std::size_t col = 0; col < spec.width; ++col) {
        double dx = std::abs(static_cast<double>(col) - cx);
        dx = std::min(dx, w - dx);
        const double bump = std::exp(-(dy * dy + dx * dx) * inv);
        for (std::size_t c = 0; c < 3; ++c) x.at(c, y, col) += amplitude[c] * bump;
      }
    }
  }
  rescale_into_unit_range(x);
  return x;
}

Tensor3 make_checker(const DatasetSpec& spec, RandomStream& rng) {
  const auto period = static_cast<double>(spec.checker_period);
  const auto oy = static_cast<double>(rng.uniform_index(spec.checker_period));
  const auto ox = static_cast<double>(rng.uniform_index(spec.checker_period));
  double amplitude[3];
  for (double& a : amplitude) a = 2.0 * rng.uniform() - 1.0;
  Tensor3 x(3, spec.height, spec.width);
  const double omega = 2.0 * std::numbers::pi / period;
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t col = 0; col < spec.width; ++col) {
      const double s = std::cos(omega * (static_cast<double>(y) + oy)) +
                       std::cos(omega * (static_cast<double>(col) + ox));
      const double sign = s >= 0.0 ? 1.0 : -1.0;
      for (std::size_t c = 0; c < 3; ++c) x.at(c, y, col) = amplitude[c] * sign;
    }
  }
  return x;
}

std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kImageDir: return "image_dir";
    case DatasetKind::kBandlimited: return "synthetic_bandlimited";
    case DatasetKind::kBlobs: return "synthetic_blobs";
    case DatasetKind::kChecker: return "synthetic_checker";
    case DatasetKind::kMixture: return "synthetic_mixture";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view text) {
  for (auto kind : {DatasetKind::kImageDir, DatasetKind::kBandlimited, DatasetKind::kBlobs,
                    DatasetKind::kChecker, DatasetKind::kMixture}) {
    if (text == to_string(kind)) return kind;
  }
  fail(ErrorKind::kInvalidArgument, "unknown dataset kind '" + std::string(text) + "'");
}

void validate(const DatasetSpec& spec) {
  require(spec.count > 0, ErrorKind::kOutOfRange, "dataset count must be positive");
  if (spec.kind == DatasetKind::kImageDir) {
    require(!spec.path.empty(), ErrorKind::kInvalidArgument, "image_dir dataset needs a path");
    require(std::filesystem::is_directory(spec.path), ErrorKind::kMissingPath,
            "no such dataset directory: " + spec.path.string());
    return;
  }
  require(spec.height > 0 && spec.width > 0, ErrorKind::kOutOfRange,
          "dataset height and width must be positive");
  require(spec.cutoff >= 0.0 && spec.cutoff <= spectral::kMaxRadius, ErrorKind::kOutOfRange,
          "dataset cutoff outside [0, sqrt(2)/2]");
  require(spec.blob_scale > 0.0, ErrorKind::kOutOfRange, "blob scale must be positive");
  require(spec.checker_period >= 2, ErrorKind::kOutOfRange, "checker period must be >= 2");
}

Tensor3 generate_one(const DatasetSpec& spec, std::size_t index) {
  RandomStream rng(spec.seed, index);
  switch (spec.kind) {
    case DatasetKind::kBandlimited: return make_bandlimited(spec, rng);
    case DatasetKind::kBlobs: return make_blobs(spec, rng);
    case DatasetKind::kChecker: return make_checker(spec, rng);
    case DatasetKind::kMixture:
      return index % 2 == 0 ? make_bandlimited(spec, rng) : make_blobs(spec, rng);
    case DatasetKind::kImageDir: break;
  }
  fail(ErrorKind::kInvalidArgument, "generate_one: not a synthetic dataset");
}

std::vector<Tensor3> generate(const DatasetSpec& spec) {
  validate(spec);
  if (spec.kind == DatasetKind::kImageDir) return read_dataset_dir(spec.path, spec.count);
  std::vector<Tensor3> images;
  images.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) images.push_back(generate_one(spec, i));
  return images;
}

void write_dataset_dir(const std::vector<Tensor3>& images, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.png", i);
    io::save_image(images[i], dir / name);
  }
  io::write_tensor(io::stack(images), dir / "images.fwt");
}

std::vector<Tensor3> read_dataset_dir(const std::filesystem::path& dir,
                                      std::optional<std::size_t> limit) {
  require(std::filesystem::is_directory(dir), ErrorKind::kMissingPath,
          "no such dataset directory: " + dir.string());
  std::vector<Tensor3> images;
  if (std::filesystem::exists(dir / "images.fwt")) {
    images = io::unstack(io::read_tensor(dir / "images.fwt"));
  } else {
    for (const auto& file : list_pngs(dir)) {
      if (limit && images.size() >= *limit) break;
      images.push_back(io::load_image(file));
    }
  }
  if (limit && images.size() > *limit) images.resize(*limit);
  require(!images.empty(), ErrorKind::kFormat, "dataset directory holds no images: " + dir.string());
  return images;
}

}  // namespace freqwarm::data

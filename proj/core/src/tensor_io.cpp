#include "freqwarm/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "freqwarm/error.hpp"

namespace freqwarm::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "TensorFile encoding assumes a little-endian host");
static_assert(sizeof(float) == 4);

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::size_t TensorN::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

std::vector<std::uint8_t> encode_tensor(const TensorN& t) {
  require(t.data.size() == t.element_count(), ErrorKind::kInvalidArgument,
          "write_tensor: payload does not match dims");
  std::vector<std::uint8_t> out;
  out.reserve(12 + 4 * t.dims.size() + 4 * t.data.size());
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  put_u32(out, kTensorVersion);
  put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put_u32(out, d);
  const std::size_t offset = out.size();
  out.resize(offset + 4 * t.data.size());
  std::memcpy(out.data() + offset, t.data.data(), 4 * t.data.size());
  return out;
}

TensorN decode_tensor(const std::vector<std::uint8_t>& in) {
  require(in.size() >= 4 && std::memcmp(in.data(), kTensorMagic, 4) == 0, ErrorKind::kFormat,
          "bad magic: not a FWT1 tensor file");
  require(in.size() >= 12, ErrorKind::kFormat, "truncated header");
  const std::uint32_t version = get_u32(in, 4);
  require(version == kTensorVersion, ErrorKind::kFormat,
          "version mismatch: expected 1, found " + std::to_string(version));
  const std::uint32_t ndim = get_u32(in, 8);
  require(in.size() >= 12 + 4ull * ndim, ErrorKind::kFormat, "truncated header");
  TensorN t;
  t.dims.resize(ndim);
  for (std::uint32_t i = 0; i < ndim; ++i) t.dims[i] = get_u32(in, 12 + 4 * i);
  const std::size_t offset = 12 + 4 * ndim;
  const std::size_t count = t.element_count();
  require(in.size() - offset >= 4 * count, ErrorKind::kFormat, "truncated payload");
  require(in.size() - offset == 4 * count, ErrorKind::kFormat, "trailing bytes after payload");
  t.data.resize(count);
  std::memcpy(t.data.data(), in.data() + offset, 4 * count);
  return t;
}

void write_tensor(const TensorN& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path.string());
}

TensorN read_tensor(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorKind::kMissingPath, "no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

TensorN to_tensor_n(const Tensor3& x) {
  TensorN t{{static_cast<std::uint32_t>(x.channels), static_cast<std::uint32_t>(x.height),
             static_cast<std::uint32_t>(x.width)},
            std::vector<float>(x.values.begin(), x.values.end())};
  return t;
}

Tensor3 to_tensor3(const TensorN& t) {
  std::vector<std::uint32_t> dims = t.dims;
  if (dims.size() == 4 && dims[0] == 1) dims.erase(dims.begin());
  require(dims.size() == 3, ErrorKind::kFormat, "expected a 3-dimensional tensor");
  Tensor3 x(dims[0], dims[1], dims[2]);
  for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] = t.data[i];
  return x;
}

TensorN stack(const std::vector<Tensor3>& items) {
  require(!items.empty(), ErrorKind::kInvalidArgument, "stack: no tensors");
  const Tensor3& first = items.front();
  TensorN t{{static_cast<std::uint32_t>(items.size()), static_cast<std::uint32_t>(first.channels),
             static_cast<std::uint32_t>(first.height), static_cast<std::uint32_t>(first.width)},
            {}};
  t.data.reserve(items.size() * first.size());
  for (const auto& x : items) {
    require(x.same_shape(first), ErrorKind::kInvalidArgument, "stack: shape mismatch");
    t.data.insert(t.data.end(), x.values.begin(), x.values.end());
  }
  return t;
}

std::vector<Tensor3> unstack(const TensorN& t) {
  require(t.dims.size() == 4, ErrorKind::kFormat, "expected a 4-dimensional tensor");
  std::vector<Tensor3> items;
  const std::size_t per = static_cast<std::size_t>(t.dims[1]) * t.dims[2] * t.dims[3];
  for (std::size_t n = 0; n < t.dims[0]; ++n) {
    Tensor3 x(t.dims[1], t.dims[2], t.dims[3]);
    for (std::size_t i = 0; i < per; ++i) x.values[i] = t.data[n * per + i];
    items.push_back(std::move(x));
  }
  return items;
}

}  // namespace freqwarm::io

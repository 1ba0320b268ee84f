#include "freqwarm/flow.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "freqwarm/adam.hpp"
#include "freqwarm/error.hpp"
#include "freqwarm/random.hpp"
#include "freqwarm/tensor_io.hpp"

namespace freqwarm::flow {

Tensor3 Standardizer::standardize(const Tensor3& z) const {
  require(z.channels == mean.size(), ErrorKind::kInvalidArgument,
          "standardize: channel count does not match statistics");
  Tensor3 out = z;
  for (std::size_t c = 0; c < z.channels; ++c)
    for (double& v : out.plane(c)) v = (v - mean[c]) / stddev[c];
  return out;
}

Tensor3 Standardizer::destandardize(const Tensor3& z) const {
  require(z.channels == mean.size(), ErrorKind::kInvalidArgument,
          "destandardize: channel count does not match statistics");
  Tensor3 out = z;
  for (std::size_t c = 0; c < z.channels; ++c)
    for (double& v : out.plane(c)) v = v * stddev[c] + mean[c];
  return out;
}

Standardizer fit_standardizer(const std::vector<Tensor3>& latents) {
  require(!latents.empty(), ErrorKind::kInvalidArgument, "cannot standardize an empty dataset");
  const std::size_t channels = latents.front().channels;
  Standardizer s{std::vector<double>(channels, 0.0), std::vector<double>(channels, 0.0)};
  std::size_t per_channel = 0;
  for (const auto& z : latents) {
    require(z.same_shape(latents.front()), ErrorKind::kInvalidArgument,
            "latents differ in shape");
    for (std::size_t c = 0; c < channels; ++c)
      for (double v : z.plane(c)) s.mean[c] += v;
    per_channel += z.plane_size();
  }
  for (double& m : s.mean) m /= static_cast<double>(per_channel);
  for (const auto& z : latents) {
    for (std::size_t c = 0; c < channels; ++c)
      for (double v : z.plane(c)) s.stddev[c] += (v - s.mean[c]) * (v - s.mean[c]);
  }
  for (double& sd : s.stddev) {
    sd = std::sqrt(sd / static_cast<double>(per_channel));
    if (!(sd > 1e-12)) sd = 1.0;
  }
  return s;
}

FlowTrainResult train_flow(const DenoiserParams& init, const Standardizer& stats,
                           const std::vector<TargetSource>& sources,
                           const TargetSchedule& schedule, const FlowTrainConfig& config) {
  validate(init);
  require(!sources.empty(), ErrorKind::kInvalidArgument, "train_flow: no target sources");
  require(config.batch_size >= 1, ErrorKind::kOutOfRange, "batch size must be positive");
  require(config.learning_rate > 0.0, ErrorKind::kOutOfRange, "learning rate must be positive");
  const std::size_t dim = init.data_dim();
  const std::size_t count = sources.front().latents->size();
  require(count > 0, ErrorKind::kInvalidArgument, "train_flow: dataset is empty");

  // Standardize every source once, flattened to rows.
  std::vector<std::vector<double>> rows(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& latents = *sources[s].latents;
    require(latents.size() == count, ErrorKind::kInvalidArgument,
            "train_flow: target sources differ in length");
    rows[s].reserve(count * dim);
    for (const auto& z : latents) {
      require(z.size() == dim, ErrorKind::kInvalidArgument,
              "train_flow: latent size does not match the denoiser");
      const Tensor3 zs = stats.standardize(z);
      rows[s].insert(rows[s].end(), zs.values.begin(), zs.values.end());
    }
  }

  FlowTrainResult result{init, {}, {}};
  result.loss_trace.reserve(config.steps);
  result.source_trace.reserve(config.steps);
  AdamOptimizer opt(config.learning_rate);
  RandomStream rng(config.seed, stream_tag("flow.train"));
  const std::size_t n = config.batch_size;
  for (std::size_t step = 0; step < config.steps; ++step) {
    const std::size_t source = schedule ? schedule(step) : 0;
    require(source < sources.size(), ErrorKind::kInvalidArgument,
            "train_flow: schedule chose an unknown source");
    Batch z0{n, dim, std::vector<double>(n * dim)};
    Batch z1{n, dim, std::vector<double>(n * dim)};
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t index = rng.uniform_index(count);
      t[i] = rng.uniform();
      for (std::size_t k = 0; k < dim; ++k) z0.values[i * dim + k] = rng.normal();
      std::copy_n(rows[source].begin() + static_cast<std::ptrdiff_t>(index * dim), dim,
                  z1.values.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    const FlowBatch batch = make_flow_batch(std::move(z0), std::move(z1), std::move(t));
    const LossGrad lg = loss_and_grad(result.params, batch);
    if (!std::isfinite(lg.loss)) {
      fail(ErrorKind::kNumerical, "train_flow diverged: non-finite loss at step " +
                                      std::to_string(step));
    }
    result.loss_trace.push_back(lg.loss);
    result.source_trace.push_back(source);
    adam_step(opt, result.params.values, lg.grads);
  }
  return result;
}

FlowTrainResult train_flow(const DenoiserParams& init, const std::vector<Tensor3>& latents,
                           const FlowTrainConfig& config, Standardizer* fitted) {
  const Standardizer stats = fit_standardizer(latents);
  if (fitted) *fitted = stats;
  return train_flow(init, stats, {{"full", &latents}}, nullptr, config);
}

Batch initial_noise(std::size_t n, std::size_t dim, std::uint64_t seed) {
  RandomStream rng(seed, stream_tag("flow.sample"));
  Batch z{n, dim, std::vector<double>(n * dim)};
  for (double& v : z.values) v = rng.normal();
  return z;
}

Batch sample(const DenoiserParams& p, std::size_t n, std::size_t steps, std::uint64_t seed) {
  require(steps >= 1, ErrorKind::kOutOfRange, "sample needs at least one Euler step");
  validate(p);
  const std::size_t dim = p.data_dim();
  Batch z = initial_noise(n, dim, seed);
  const double dt = 1.0 / static_cast<double>(steps);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = z.row(i);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      forward_one(p, row, t, v);
      for (std::size_t j = 0; j < dim; ++j) {
        row[j] += dt * v[j];
        if (!std::isfinite(row[j])) {
          fail(ErrorKind::kNumerical, "sample: non-finite state at Euler step " +
                                          std::to_string(k) + " of sample " + std::to_string(i));
        }
      }
    }
  }
  return z;
}

Tensor3 row_to_latent(std::span<const double> row, std::size_t c, std::size_t h, std::size_t w) {
  require(row.size() == c * h * w, ErrorKind::kInvalidArgument, "row does not match latent shape");
  Tensor3 z(c, h, w);
  std::copy(row.begin(), row.end(), z.values.begin());
  return z;
}

std::vector<Tensor3> generate_latents(const FlowModel& model, std::size_t n, std::size_t steps,
                                      std::uint64_t seed) {
  const Batch z = sample(model.denoiser, n, steps, seed);
  std::vector<Tensor3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(model.stats.destandardize(
        row_to_latent(z.row(i), model.channels, model.height, model.width)));
  }
  return out;
}

void save(const FlowModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream header(dir / "flow.txt", std::ios::trunc);
  require(static_cast<bool>(header), ErrorKind::kIo, "cannot write " + (dir / "flow.txt").string());
  header << "channels=" << model.channels << "\nheight=" << model.height
         << "\nwidth=" << model.width << "\nseed=" << model.denoiser.seed << "\nwidths=";
  for (std::size_t i = 0; i < model.denoiser.widths.size(); ++i)
    header << (i ? "," : "") << model.denoiser.widths[i];
  header << "\n";
  io::write_tensor({{static_cast<std::uint32_t>(model.denoiser.values.size())},
                    std::vector<float>(model.denoiser.values.begin(), model.denoiser.values.end())},
                   dir / "denoiser.fwt");
  io::TensorN stats{{2, static_cast<std::uint32_t>(model.channels)}, {}};
  stats.data.insert(stats.data.end(), model.stats.mean.begin(), model.stats.mean.end());
  stats.data.insert(stats.data.end(), model.stats.stddev.begin(), model.stats.stddev.end());
  io::write_tensor(stats, dir / "stats.fwt");
}

FlowModel load(const std::filesystem::path& dir) {
  const auto header_path = dir / "flow.txt";
  require(std::filesystem::exists(header_path), ErrorKind::kMissingPath,
          "no flow model header: " + header_path.string());
  std::ifstream header(header_path);
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(header, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  FlowModel model;
  try {
    model.channels = std::stoul(fields.at("channels"));
    model.height = std::stoul(fields.at("height"));
    model.width = std::stoul(fields.at("width"));
    model.denoiser.seed = std::stoull(fields.at("seed"));
    std::stringstream widths(fields.at("widths"));
    std::string item;
    while (std::getline(widths, item, ',')) model.denoiser.widths.push_back(std::stoul(item));
  } catch (const std::exception&) {
    fail(ErrorKind::kFormat, "malformed flow model header: " + header_path.string());
  }
  const io::TensorN values = io::read_tensor(dir / "denoiser.fwt");
  model.denoiser.values.assign(values.data.begin(), values.data.end());
  validate(model.denoiser);
  const io::TensorN stats = io::read_tensor(dir / "stats.fwt");
  require(stats.dims.size() == 2 && stats.dims[0] == 2 && stats.dims[1] == model.channels,
          ErrorKind::kFormat, "stats.fwt does not match the header");
  model.stats.mean.assign(stats.data.begin(), stats.data.begin() + model.channels);
  model.stats.stddev.assign(stats.data.begin() + model.channels, stats.data.end());
  return model;
}

}  // namespace freqwarm::flow

#include "freqwarm/run_config.hpp"

#include <fstream>
#include <sstream>

#include "freqwarm/error.hpp"

namespace freqwarm {
namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(!text.empty() && used == text.size(), ErrorKind::kInvalidArgument,
          "config " + key + ": '" + text + "' is not a number");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(!text.empty() && used == text.size() && text.front() != '-', ErrorKind::kInvalidArgument,
          "config " + key + ": '" + text + "' is not a non-negative integer");
  return v;
}

}  // namespace

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> table = {
      {"data.kind", "synthetic_mixture"},
      {"data.count", "256"},
      {"data.height", "32"},
      {"data.width", "32"},
      {"data.seed", "0"},
      {"data.cutoff", "0.45"},
      {"data.blob_count", "6"},
      {"data.blob_scale", "0.08"},
      {"data.checker_period", "8"},
      {"data.path", ""},
      {"ae.variant", "trainable_linear"},
      {"ae.compression", "4"},
      {"ae.channels", "32"},
      {"ae.seed", "0"},
      {"ae.steps", "2000"},
      {"ae.lr", "0.001"},
      {"flow.hidden", "0"},
      {"flow.steps", "20000"},
      {"flow.batch", "32"},
      {"flow.lr", "0.001"},
      {"flow.seed", "0"},
      {"flow.holdout", "64"},
      {"flow.samples", "256"},
      {"flow.sample_steps", "50"},
      {"flow.bins", "0"},
      {"curriculum.enabled", "false"},
      {"curriculum.r0", "0.2"},
      {"curriculum.warmup_fraction", "0.8"},
      {"analysis.radii", "0.05,0.10,0.15,0.20"},
      {"analysis.thresholds", "0.03,0.05,0.20,full"},
      {"analysis.bins", "0"},
      {"analysis.energy_cutoff", "0.1"},
      {"analysis.save_images", "0"},
      {"gap.channels", "4,8,16,32,64"},
      {"gap.r0", "0.2"},
      {"gap.high_cutoff", "0.35"},
      {"sweep.r0", "0.05,0.20,0.40,0.60"},
  };
  return table;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  require(it != values_.end(), ErrorKind::kUnknownKey, "unknown config key '" + key + "'");
  require(value.find('\n') == std::string::npos, ErrorKind::kInvalidArgument,
          "config " + key + ": value contains a newline");
  it->second = value;
}

void RunConfig::merge_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos, ErrorKind::kInvalidArgument,
          "expected key=value, got '" + std::string(assignment) + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::merge_text(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string line =
        trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    ++line_no;
    if (!line.empty() && line.front() != '#') {
      try {
        merge_assignment(line);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorKind::kMissingPath,
          "no such config file: " + path.string());
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot read config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path.string());
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  require(it != values_.end(), ErrorKind::kUnknownKey, "unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

std::size_t RunConfig::get_size(const std::string& key) const {
  return static_cast<std::size_t>(to_u64(key, get(key)));
}

std::uint64_t RunConfig::get_u64(const std::string& key) const { return to_u64(key, get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  fail(ErrorKind::kInvalidArgument, "config " + key + ": '" + v + "' is not a boolean");
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::size_t> RunConfig::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(get(key))) out.push_back(to_u64(key, item));
  return out;
}

std::vector<std::string> RunConfig::get_strings(const std::string& key) const {
  return split_list(get(key));
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

RunConfig RunConfig::from_echo(std::string_view echo) {
  RunConfig config;
  config.merge_text(echo, "<echo>");
  return config;
}

data::DatasetSpec dataset_spec(const RunConfig& config) {
  data::DatasetSpec spec;
  spec.kind = data::parse_dataset_kind(config.get("data.kind"));
  spec.count = config.get_size("data.count");
  spec.height = config.get_size("data.height");
  spec.width = config.get_size("data.width");
  spec.seed = config.get_u64("data.seed");
  spec.cutoff = config.get_double("data.cutoff");
  spec.blob_count = config.get_size("data.blob_count");
  spec.blob_scale = config.get_double("data.blob_scale");
  spec.checker_period = config.get_size("data.checker_period");
  spec.path = config.get("data.path");
  data::validate(spec);
  return spec;
}

autoencoder::AEConfig ae_config(const RunConfig& config) {
  autoencoder::AEConfig c;
  c.variant = autoencoder::parse_variant(config.get("ae.variant"));
  c.compression = config.get_size("ae.compression");
  c.channels = config.get_size("ae.channels");
  c.seed = config.get_u64("ae.seed");
  autoencoder::validate(c);
  return c;
}

experiments::GeneratorConfig generator_config(const RunConfig& config) {
  experiments::GeneratorConfig g;
  g.hidden_width = config.get_size("flow.hidden");
  g.train.steps = config.get_size("flow.steps");
  g.train.batch_size = config.get_size("flow.batch");
  g.train.learning_rate = config.get_double("flow.lr");
  g.train.seed = config.get_u64("flow.seed");
  g.sample_count = config.get_size("flow.samples");
  g.sample_steps = config.get_size("flow.sample_steps");
  g.bin_count = config.get_size("flow.bins");
  require(g.train.batch_size >= 1, ErrorKind::kOutOfRange, "flow.batch must be positive");
  require(g.train.learning_rate > 0.0, ErrorKind::kOutOfRange, "flow.lr must be positive");
  require(g.sample_steps >= 1, ErrorKind::kOutOfRange, "flow.sample_steps must be positive");
  require(g.sample_count >= 1, ErrorKind::kOutOfRange, "flow.samples must be positive");
  return g;
}

experiments::CurriculumConfig curriculum_config(const RunConfig& config) {
  experiments::CurriculumConfig c;
  c.enabled = config.get_bool("curriculum.enabled");
  c.r0 = config.get_double("curriculum.r0");
  c.warmup_fraction = config.get_double("curriculum.warmup_fraction");
  experiments::validate(c);
  return c;
}

experiments::GapSweepConfig gap_sweep_config(const RunConfig& config) {
  experiments::GapSweepConfig g;
  const auto ae = autoencoder::parse_variant(config.get("ae.variant"));
  g.compression = config.get_size("ae.compression");
  g.variant = ae;
  g.ae_seed = config.get_u64("ae.seed");
  g.ae_steps = config.get_size("ae.steps");
  g.ae_learning_rate = config.get_double("ae.lr");
  g.r0 = config.get_double("gap.r0");
  g.high_cutoff = config.get_double("gap.high_cutoff");
  g.bin_count = config.get_size("analysis.bins");
  return g;
}

}  // namespace freqwarm

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "freqwarm/autoencoder.hpp"
#include "freqwarm/dataset.hpp"
#include "freqwarm/experiments.hpp"

namespace freqwarm {

/// Flat key=value configuration. Every key has a default; reading a file or
/// setting a value with an unrecognised key throws kUnknownKey. The resolved
/// configuration is echoed verbatim into reports, and parsing an echo gives
/// back an equal RunConfig.
class RunConfig {
 public:
  RunConfig();

  /// One pair per line; blank lines and lines starting with '#' are ignored.
  void merge_text(std::string_view text, std::string_view origin = "<text>");
  void merge_file(const std::filesystem::path& path);
  /// Accepts "key=value".
  void merge_assignment(std::string_view assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  /// Sorted "key=value\n" lines.
  std::string echo() const;
  static RunConfig from_echo(std::string_view echo);

  static const std::map<std::string, std::string>& defaults();

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

 private:
  std::map<std::string, std::string> values_;
};

data::DatasetSpec dataset_spec(const RunConfig& config);
autoencoder::AEConfig ae_config(const RunConfig& config);
experiments::GeneratorConfig generator_config(const RunConfig& config);
experiments::CurriculumConfig curriculum_config(const RunConfig& config);
experiments::GapSweepConfig gap_sweep_config(const RunConfig& config);

}  // namespace freqwarm

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqwarm {

/// Failure category. The CLI maps each category onto a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,  // malformed input: bad shape, non-finite values, bad flag
  kOutOfRange,       // a numeric parameter outside its admissible interval
  kUnknownKey,       // config key not recognised
  kMissingPath,      // referenced file or directory does not exist
  kIo,               // read/write failure on an existing path
  kFormat,           // file exists but its contents are not what we expect
  kNumerical,        // divergence, NaN loss, non-Hermitian spectrum
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace freqwarm

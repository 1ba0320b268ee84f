#include "freqwarm/error.hpp"

namespace freqwarm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kOutOfRange: return "out_of_range";
    case ErrorKind::kUnknownKey: return "unknown_key";
    case ErrorKind::kMissingPath: return "missing_path";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kNumerical: return "numerical";
  }
  return "unknown";
}

}  // namespace freqwarm

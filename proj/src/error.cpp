#include "gcbb/error.hpp"

namespace gcbb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_instance: return "invalid instance";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::oracle_size: return "oracle size";
    case ErrorKind::input: return "input error";
    case ErrorKind::config: return "config error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::empty_table: return "empty table";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace gcbb

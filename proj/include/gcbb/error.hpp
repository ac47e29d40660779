#pragma once

#include <stdexcept>
#include <string>

namespace gcbb {

enum class ErrorKind {
  invalid_instance,
  parse,
  oracle_size,
  input,
  config,
  insufficient_data,
  empty_table,
};

const char* to_string(ErrorKind kind);

// Every recoverable failure in the library surfaces as this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gcbb

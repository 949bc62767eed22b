#ifndef HANDPIPE_ERROR_HPP_
#define HANDPIPE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace handpipe {

// Exit codes used by the CLI: 0 success, 2 input format, 3 config/graph, 4 data mismatch.
enum ExitCode : int {
  kExitOk = 0,
  kExitFormatError = 2,
  kExitConfigError = 3,
  kExitMismatchError = 4,
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class MismatchError : public std::runtime_error {
 public:
  explicit MismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace handpipe

#endif  // HANDPIPE_ERROR_HPP_

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace promptevo {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration. Carries every violated invariant, not just the first.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> issues);
  explicit ConfigError(const std::string& issue) : ConfigError(std::vector<std::string>{issue}) {}

  [[nodiscard]] const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
  std::vector<std::string> issues_;
};

// A worker broke the generator/evaluator contract (bad counts, out-of-range
// values, unknown reply ids, malformed messages).
class ProtocolError : public Error {
public:
  using Error::Error;
};

// The worker failed to answer: timeouts, crashes, error replies after retries.
class WorkerError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Precondition violation by the caller of a library function.
class UsageError : public Error {
public:
  using Error::Error;
};

} // namespace promptevo

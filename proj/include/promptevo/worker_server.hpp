#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "promptevo/testbed.hpp"

namespace promptevo {

// Worker side of the protocol, backed by the builtin testbed. Stateless
// apart from the shutdown flag, so replaying a request transcript always
// yields the same reply bytes.
class WorkerServer {
public:
  explicit WorkerServer(testbed::TestbedSpec spec, int max_concurrency = 8);

  // Reply line for one request line. nullopt when the line is so malformed
  // that no request id can be recovered; the caller should then log and exit.
  [[nodiscard]] std::optional<std::string> handle(const std::string& line);

  [[nodiscard]] bool shutdown_requested() const noexcept { return shutdown_; }

private:
  testbed::TestbedWorker worker_;
  int max_concurrency_;
  bool shutdown_ = false;
};

// Serves requests line by line until shutdown or end of input. Returns the
// process exit code: 0 on shutdown/EOF, 1 after an unrecoverable line.
int serve_stream(WorkerServer& server, std::istream& in, std::ostream& out, std::ostream& log);

// Accepts one TCP connection on `port` (0 picks a free port, reported via
// `on_listening`) and serves it.
int serve_tcp(WorkerServer& server, std::uint16_t port, std::ostream& log,
              const std::function<void(std::uint16_t)>& on_listening = {});

} // namespace promptevo

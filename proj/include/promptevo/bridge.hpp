#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <thread>

#include <json.hpp>

#include "promptevo/config.hpp"
#include "promptevo/contracts.hpp"
#include "promptevo/transport.hpp"
#include "promptevo/wire.hpp"

namespace promptevo {

struct ClientOptions {
  std::chrono::milliseconds handshake_timeout{10'000};
  std::chrono::milliseconds call_timeout{120'000};
  std::size_t retries = 2;
};

// Engine side of the worker protocol. A single reader thread matches replies
// to waiting callers by id, so replies may arrive out of order; writes are
// serialized; at most max_concurrency requests are in flight.
//
// An unknown reply id, a malformed line, or end of stream poisons the client:
// every pending and later call fails with that error.
class BridgeClient {
public:
  BridgeClient(std::unique_ptr<Transport> transport, ClientOptions options);
  ~BridgeClient();

  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  // Throws WorkerError on timeout ("timeout during handshake ...") and
  // ProtocolError on a malformed reply or unsupported version.
  wire::WorkerInfo handshake();

  // Sends one request and returns the reply body. Idempotent kinds are
  // retried up to `retries` times on timeout or error reply. A worker error
  // message surfaces verbatim in the thrown WorkerError.
  nlohmann::json call(wire::Kind kind, const nlohmann::json& body);

  [[nodiscard]] const std::optional<wire::WorkerInfo>& info() const noexcept { return info_; }

private:
  using Reply = std::variant<wire::WireMessage, std::exception_ptr>;

  // Returns nullopt on timeout.
  std::optional<wire::WireMessage> round_trip(wire::Kind kind, const nlohmann::json& body,
                                              std::chrono::milliseconds timeout);
  void reader_loop();
  void poison(std::exception_ptr error);

  std::unique_ptr<Transport> transport_;
  ClientOptions options_;
  std::optional<wire::WorkerInfo> info_;
  std::unique_ptr<std::counting_semaphore<>> slots_;

  std::mutex write_mutex_;
  std::mutex state_mutex_;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, std::promise<wire::WireMessage>> pending_;
  std::set<std::uint64_t> abandoned_;
  std::exception_ptr fatal_;
  std::thread reader_;
};

// Generator + evaluator over a BridgeClient. Replies are validated here:
// objective values outside [0, 1] raise ProtocolError naming the label index.
class RemoteWorker final : public Worker {
public:
  explicit RemoteWorker(std::unique_ptr<BridgeClient> client);

  Generated generate(const std::string& prompt, std::uint64_t seed) override;
  Generated mutate(const std::string& prompt, const Genotype& parent, std::uint64_t seed,
                   double strength) override;
  std::vector<double> evaluate(const PhenotypeRef& phenotype, const std::vector<std::string>& labels) override;
  double embed_similarity(const PhenotypeRef& phenotype, const std::string& prompt) override;

  [[nodiscard]] BridgeClient& client() noexcept { return *client_; }

private:
  std::unique_ptr<BridgeClient> client_;
};

[[nodiscard]] ClientOptions client_options(const RunConfig& config);

// Builtin testbed, or a handshaken RemoteWorker for command/network workers.
[[nodiscard]] std::unique_ptr<Worker> connect_worker(const RunConfig& config);

} // namespace promptevo

#include "promptevo/bridge.hpp"

#include <algorithm>

#include "promptevo/base64.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/testbed.hpp"

namespace promptevo {

using nlohmann::json;
using wire::Kind;
using wire::WireMessage;

BridgeClient::BridgeClient(std::unique_ptr<Transport> transport, ClientOptions options)
    : transport_(std::move(transport)), options_(options), reader_([this] { reader_loop(); }) {}

BridgeClient::~BridgeClient() {
  std::optional<std::uint64_t> shutdown_id;
  {
    std::lock_guard lock(state_mutex_);
    if (!fatal_ && info_) {
      shutdown_id = next_id_++;
      abandoned_.insert(*shutdown_id);
    }
  }
  if (shutdown_id) {
    try {
      std::lock_guard lock(write_mutex_);
      transport_->send_line(wire::encode({*shutdown_id, Kind::shutdown, json::object()}));
    } catch (...) {
      // worker already gone
    }
  }
  transport_->close();
  if (reader_.joinable()) reader_.join();
}

void BridgeClient::poison(std::exception_ptr error) {
  std::lock_guard lock(state_mutex_);
  if (!fatal_) fatal_ = error;
  for (auto& [id, promise] : pending_) {
    promise.set_exception(fatal_);
  }
  pending_.clear();
}

void BridgeClient::reader_loop() {
  for (;;) {
    std::optional<std::string> line;
    try {
      line = transport_->receive_line();
    } catch (...) {
      poison(std::current_exception());
      return;
    }
    if (!line) {
      poison(std::make_exception_ptr(WorkerError("worker closed the connection")));
      return;
    }
    WireMessage msg;
    try {
      msg = wire::decode(*line);
      if (msg.kind != Kind::reply && msg.kind != Kind::error) {
        throw ProtocolError("worker sent a '" + std::string(wire::to_string(msg.kind)) + "' message");
      }
    } catch (...) {
      poison(std::current_exception());
      return;
    }
    std::lock_guard lock(state_mutex_);
    if (auto it = pending_.find(msg.id); it != pending_.end()) {
      it->second.set_value(std::move(msg));
      pending_.erase(it);
    } else if (abandoned_.erase(msg.id) == 0) {
      const auto error = std::make_exception_ptr(ProtocolError("reply with unknown id " + std::to_string(msg.id)));
      if (!fatal_) fatal_ = error;
      for (auto& [id, promise] : pending_) promise.set_exception(fatal_);
      pending_.clear();
      return;
    }
  }
}

std::optional<WireMessage> BridgeClient::round_trip(Kind kind, const json& body, std::chrono::milliseconds timeout) {
  std::future<WireMessage> future;
  std::uint64_t id = 0;
  {
    std::lock_guard lock(state_mutex_);
    if (fatal_) std::rethrow_exception(fatal_);
    id = next_id_++;
    future = pending_[id].get_future();
  }
  {
    std::lock_guard lock(write_mutex_);
    try {
      transport_->send_line(wire::encode({id, kind, body}));
    } catch (...) {
      std::lock_guard state(state_mutex_);
      pending_.erase(id);
      throw;
    }
  }
  if (future.wait_for(timeout) == std::future_status::ready) {
    return future.get();
  }
  std::lock_guard lock(state_mutex_);
  if (pending_.erase(id) == 0) {
    // The reply (or a fatal error) raced the timeout.
    return future.get();
  }
  abandoned_.insert(id);
  return std::nullopt;
}

wire::WorkerInfo BridgeClient::handshake() {
  const auto reply = round_trip(Kind::handshake, {{"protocol_version", wire::protocol_version}},
                                options_.handshake_timeout);
  if (!reply) {
    throw WorkerError("timeout during handshake (" + std::to_string(options_.handshake_timeout.count()) +
                      " ms without a reply)");
  }
  if (reply->kind == Kind::error) {
    throw WorkerError("handshake rejected: " + reply->body.value("message", std::string{}));
  }
  const auto& b = reply->body;
  wire::WorkerInfo info;
  try {
    info.protocol_version = b.at("protocol_version").get<int>();
    info.max_concurrency = b.at("max_concurrency").get<int>();
    info.supports = b.at("supports").get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw ProtocolError("malformed handshake reply");
  }
  if (info.protocol_version != wire::protocol_version) {
    throw ProtocolError("unsupported protocol version " + std::to_string(info.protocol_version) +
                        " (engine speaks " + std::to_string(wire::protocol_version) + ")");
  }
  if (info.max_concurrency < 1) {
    throw ProtocolError("worker declared max_concurrency < 1");
  }
  for (const char* needed : {"generate", "mutate", "evaluate", "similarity"}) {
    if (std::find(info.supports.begin(), info.supports.end(), needed) == info.supports.end()) {
      throw ProtocolError(std::string("worker does not support '") + needed + "'");
    }
  }
  slots_ = std::make_unique<std::counting_semaphore<>>(info.max_concurrency);
  info_ = info;
  return info;
}

json BridgeClient::call(Kind kind, const json& body) {
  if (!info_) {
    throw UsageError("call before handshake");
  }
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{slots_.get()};

  const std::size_t attempts = wire::is_idempotent(kind) ? options_.retries + 1 : 1;
  std::string last_failure;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    auto reply = round_trip(kind, body, options_.call_timeout);
    if (!reply) {
      last_failure = "timeout after " + std::to_string(options_.call_timeout.count()) + " ms waiting for " +
                     std::string(wire::to_string(kind)) + " reply";
      continue;
    }
    if (reply->kind == Kind::error) {
      last_failure = reply->body.value("message", std::string{"(no message)"});
      continue;
    }
    return std::move(reply->body);
  }
  throw WorkerError(last_failure + " (after " + std::to_string(attempts) + " attempt" + (attempts == 1 ? "" : "s") +
                    ")");
}

namespace {

Generated parse_generated(const json& body) {
  try {
    const auto& ph = body.at("phenotype");
    std::optional<PhenotypeRef::Dims> dims;
    if (ph.contains("dims") && !ph["dims"].is_null()) {
      dims = ph["dims"].get<PhenotypeRef::Dims>();
    }
    return {base64_decode(body.at("genotype").get<std::string>()), PhenotypeRef(ph.at("id").get<std::string>(), dims)};
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed generate/mutate reply: ") + e.what());
  }
}

} // namespace

RemoteWorker::RemoteWorker(std::unique_ptr<BridgeClient> client) : client_(std::move(client)) {}

Generated RemoteWorker::generate(const std::string& prompt, std::uint64_t seed) {
  return parse_generated(client_->call(Kind::generate, {{"prompt", prompt}, {"seed", seed}}));
}

Generated RemoteWorker::mutate(const std::string& prompt, const Genotype& parent, std::uint64_t seed,
                               double strength) {
  return parse_generated(client_->call(
      Kind::mutate,
      {{"prompt", prompt}, {"genotype", base64_encode(parent.payload)}, {"seed", seed}, {"strength", strength}}));
}

std::vector<double> RemoteWorker::evaluate(const PhenotypeRef& phenotype, const std::vector<std::string>& labels) {
  const auto body = client_->call(Kind::evaluate, {{"phenotype", phenotype.id()}, {"labels", labels}});
  if (!body.contains("objectives") || !body["objectives"].is_array()) {
    throw ProtocolError("malformed evaluate reply: missing objectives");
  }
  std::vector<double> values;
  for (std::size_t i = 0; i < body["objectives"].size(); ++i) {
    const auto& v = body["objectives"][i];
    if (!v.is_number()) {
      throw ProtocolError("objective for label index " + std::to_string(i) + " is not a number");
    }
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ProtocolError("objective for label index " + std::to_string(i) + " out of range [0,1]: " + v.dump());
    }
    values.push_back(x);
  }
  return values;
}

double RemoteWorker::embed_similarity(const PhenotypeRef& phenotype, const std::string& prompt) {
  const auto body = client_->call(Kind::similarity, {{"phenotype", phenotype.id()}, {"prompt", prompt}});
  if (!body.contains("cosine") || !body["cosine"].is_number()) {
    throw ProtocolError("malformed similarity reply: missing cosine");
  }
  const double c = body["cosine"].get<double>();
  if (!(c >= -1.0 && c <= 1.0)) {
    throw ProtocolError("similarity out of range [-1,1]: " + body["cosine"].dump());
  }
  return c;
}

ClientOptions client_options(const RunConfig& config) {
  using std::chrono::milliseconds;
  return {milliseconds(static_cast<long long>(config.handshake_timeout_s * 1000.0)),
          milliseconds(static_cast<long long>(config.call_timeout_s * 1000.0)), config.retries};
}

std::unique_ptr<Worker> connect_worker(const RunConfig& config) {
  return std::visit(
      [&](const auto& w) -> std::unique_ptr<Worker> {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, BuiltinWorker>) {
          return std::make_unique<testbed::TestbedWorker>(config.testbed);
        } else {
          std::unique_ptr<Transport> transport;
          if constexpr (std::is_same_v<W, CommandWorker>) {
            transport = std::make_unique<PipeTransport>(w.command);
          } else {
            transport = std::make_unique<TcpTransport>(w.host, w.port);
          }
          auto client = std::make_unique<BridgeClient>(std::move(transport), client_options(config));
          client->handshake();
          return std::make_unique<RemoteWorker>(std::move(client));
        }
      },
      config.worker);
}

} // namespace promptevo

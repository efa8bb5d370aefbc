#include "promptevo/worker_server.hpp"

#include <functional>
#include <istream>
#include <ostream>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "promptevo/base64.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/wire.hpp"

namespace promptevo {

using nlohmann::json;
using wire::Kind;
using wire::WireMessage;

namespace {

json generated_body(const Generated& g) {
  json phenotype = {{"id", g.phenotype.id()}};
  if (g.phenotype.dims()) phenotype["dims"] = *g.phenotype.dims();
  return {{"genotype", base64_encode(g.payload)}, {"phenotype", phenotype}};
}

template <typename T>
T field(const json& body, const char* name) {
  const auto it = body.find(name);
  if (it == body.end()) {
    throw ProtocolError(std::string("missing field '") + name + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(std::string("field '") + name + "' has the wrong type");
  }
}

} // namespace

WorkerServer::WorkerServer(testbed::TestbedSpec spec, int max_concurrency)
    : worker_(std::move(spec)), max_concurrency_(max_concurrency) {}

std::optional<std::string> WorkerServer::handle(const std::string& line) {
  WireMessage request;
  try {
    request = wire::decode(line);
  } catch (const ProtocolError& e) {
    const auto j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("id") && j["id"].is_number_unsigned()) {
      return wire::encode({j["id"].get<std::uint64_t>(), Kind::error, {{"message", e.what()}}});
    }
    return std::nullopt;
  }
  const auto& b = request.body;
  try {
    json reply;
    switch (request.kind) {
    case Kind::handshake:
      reply = {{"protocol_version", wire::protocol_version},
               {"max_concurrency", max_concurrency_},
               {"supports", {"evaluate", "generate", "mutate", "similarity"}}};
      break;
    case Kind::generate:
      reply = generated_body(worker_.generate(field<std::string>(b, "prompt"), field<std::uint64_t>(b, "seed")));
      break;
    case Kind::mutate: {
      Genotype parent{base64_decode(field<std::string>(b, "genotype")), 0};
      reply = generated_body(worker_.mutate(field<std::string>(b, "prompt"), parent,
                                            field<std::uint64_t>(b, "seed"), field<double>(b, "strength")));
      break;
    }
    case Kind::evaluate:
      reply = {{"objectives", worker_.evaluate(PhenotypeRef(field<std::string>(b, "phenotype")),
                                               field<std::vector<std::string>>(b, "labels"))}};
      break;
    case Kind::similarity:
      reply = {{"cosine", worker_.embed_similarity(PhenotypeRef(field<std::string>(b, "phenotype")),
                                                   field<std::string>(b, "prompt"))}};
      break;
    case Kind::shutdown:
      shutdown_ = true;
      reply = json::object();
      break;
    case Kind::reply:
    case Kind::error:
      throw ProtocolError("workers do not accept '" + std::string(wire::to_string(request.kind)) + "' messages");
    }
    return wire::encode({request.id, Kind::reply, reply});
  } catch (const std::exception& e) {
    return wire::encode({request.id, Kind::error, {{"message", e.what()}}});
  }
}

int serve_stream(WorkerServer& server, std::istream& in, std::ostream& out, std::ostream& log) {
  std::string line;
  while (!server.shutdown_requested() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto reply = server.handle(line);
    if (!reply) {
      log << "promptevo worker: unrecoverable message, exiting\n";
      return 1;
    }
    out << *reply << '\n' << std::flush;
  }
  return 0;
}

int serve_tcp(WorkerServer& server, std::uint16_t port, std::ostream& log,
              const std::function<void(std::uint16_t)>& on_listening) {
  const int listener = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listener < 0) {
    log << "promptevo worker: cannot create socket\n";
    return 1;
  }
  int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 1) != 0) {
    log << "promptevo worker: cannot listen on port " << port << "\n";
    ::close(listener);
    return 1;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listening) on_listening(ntohs(addr.sin_port));
  const int fd = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (fd < 0) {
    log << "promptevo worker: accept failed\n";
    return 1;
  }
  std::string buffer;
  int rc = 0;
  char chunk[4096];
  while (!server.shutdown_requested()) {
    const auto pos = buffer.find('\n');
    if (pos == std::string::npos) {
      const ssize_t n = ::read(fd, chunk, sizeof chunk);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      continue;
    }
    std::string line = buffer.substr(0, pos);
    buffer.erase(0, pos + 1);
    if (line.empty()) continue;
    auto reply = server.handle(line);
    if (!reply) {
      log << "promptevo worker: unrecoverable message, exiting\n";
      rc = 1;
      break;
    }
    *reply += '\n';
    if (::send(fd, reply->data(), reply->size(), MSG_NOSIGNAL) < 0) break;
  }
  ::close(fd);
  return rc;
}

} // namespace promptevo

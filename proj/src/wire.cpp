#include "promptevo/wire.hpp"

#include <array>

#include "promptevo/errors.hpp"

namespace promptevo::wire {

namespace {
constexpr std::array<std::pair<Kind, std::string_view>, 8> kind_names{{
    {Kind::handshake, "handshake"},
    {Kind::generate, "generate"},
    {Kind::mutate, "mutate"},
    {Kind::evaluate, "evaluate"},
    {Kind::similarity, "similarity"},
    {Kind::shutdown, "shutdown"},
    {Kind::reply, "reply"},
    {Kind::error, "error"},
}};
} // namespace

std::string_view to_string(Kind kind) noexcept {
  for (const auto& [k, name] : kind_names) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<Kind> parse_kind(std::string_view text) noexcept {
  for (const auto& [k, name] : kind_names) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool is_idempotent(Kind kind) noexcept {
  return kind == Kind::generate || kind == Kind::mutate || kind == Kind::evaluate || kind == Kind::similarity;
}

std::string encode(const WireMessage& message) {
  std::string out = "{\"id\":";
  out += std::to_string(message.id);
  out += ",\"kind\":\"";
  out += to_string(message.kind);
  out += "\",\"body\":";
  out += message.body.dump();
  out += '}';
  return out;
}

WireMessage decode(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("malformed message: not JSON");
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned()) {
    throw ProtocolError("malformed message: missing integer id");
  }
  WireMessage m;
  m.id = j["id"].get<std::uint64_t>();
  const auto fail = [&](const std::string& why) {
    throw ProtocolError("malformed message id " + std::to_string(m.id) + ": " + why);
  };
  if (j.size() != 3) fail("expected exactly id, kind and body");
  if (!j.contains("kind") || !j["kind"].is_string()) fail("missing kind");
  const auto kind = parse_kind(j["kind"].get<std::string>());
  if (!kind) fail("unknown kind '" + j["kind"].get<std::string>() + "'");
  m.kind = *kind;
  if (!j.contains("body") || !j["body"].is_object()) fail("body must be an object");
  m.body = std::move(j["body"]);
  return m;
}

} // namespace promptevo::wire

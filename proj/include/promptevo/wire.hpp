#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace promptevo::wire {

inline constexpr int protocol_version = 1;

enum class Kind { handshake, generate, mutate, evaluate, similarity, shutdown, reply, error };

[[nodiscard]] std::string_view to_string(Kind kind) noexcept;
[[nodiscard]] std::optional<Kind> parse_kind(std::string_view text) noexcept;
// generate, mutate, evaluate and similarity are pure given their inputs.
[[nodiscard]] bool is_idempotent(Kind kind) noexcept;

// One protocol line: {"id":<uint>,"kind":<string>,"body":<object>}.
struct WireMessage {
  std::uint64_t id = 0;
  Kind kind = Kind::reply;
  nlohmann::json body = nlohmann::json::object();
};

// Envelope keys in the order id, kind, body; body keys sorted; no spaces; no
// trailing newline.
[[nodiscard]] std::string encode(const WireMessage& message);

// Throws ProtocolError on anything but a well-formed envelope.
[[nodiscard]] WireMessage decode(std::string_view line);

struct WorkerInfo {
  int protocol_version = 0;
  int max_concurrency = 1;
  std::vector<std::string> supports;
};

} // namespace promptevo::wire

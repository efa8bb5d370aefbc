#pragma once

#include <span>
#include <string>
#include <string_view>

#include "promptevo/types.hpp"

namespace promptevo {

// RFC 4648 standard alphabet with '=' padding.
[[nodiscard]] std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws ProtocolError on malformed input.
[[nodiscard]] Bytes base64_decode(std::string_view text);

} // namespace promptevo

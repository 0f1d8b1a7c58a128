#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vreason {

// RFC 4648 standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace vreason

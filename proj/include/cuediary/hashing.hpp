#pragma once

#include <string>
#include <string_view>

namespace cuediary {

/// Lower-case hex SHA-256 of raw bytes.
std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);
/// Throws Error(InvalidArgument) on malformed input.
std::string base64_decode(std::string_view encoded);

}  // namespace cuediary

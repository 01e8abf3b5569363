#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ioda {

/// 64-bit FNV-1a over raw bytes, rendered as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace ioda

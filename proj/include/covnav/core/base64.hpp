#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace covnav {

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

// Pack a vector of 0/1 flags into bytes, LSB-first within each byte.
std::vector<uint8_t> pack_bits(const std::vector<uint8_t>& bits);
std::vector<uint8_t> unpack_bits(const std::vector<uint8_t>& bytes, size_t n_bits);

}  // namespace covnav

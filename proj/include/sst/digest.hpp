#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

// FNV-1a 64-bit digests, used to fingerprint sample streams and resolved
// configs. Not cryptographic; collisions only matter for accidental
// mismatch detection.
namespace sst::digest {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t update(std::uint64_t h, const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<std::uint64_t>(p[i]);
    h *= kFnvPrime;
  }
  return h;
}

// Doubles are hashed by bit pattern, so -0.0 and 0.0 differ; streams never
// produce negative zero so this is moot in practice.
inline std::uint64_t update(std::uint64_t h, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  return update(h, &bits, sizeof(bits));
}

inline std::uint64_t update(std::uint64_t h, std::string_view s) {
  return update(h, s.data(), s.size());
}

inline std::string to_hex(std::uint64_t h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace sst::digest

#pragma once
// Shared small utilities: error type, deterministic hashing, bounded RNG draws.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace corrx {

inline constexpr const char* kVersion = "0.1.0";

// All library errors derive from this; constructors and checked operations
// throw rather than returning sentinel values.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a 64-bit digest, used for stable content digests in reports.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 1469598103934665603ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// Unbiased draw from [0, n) with a platform-independent sequence.
// std::uniform_int_distribution is implementation-defined, so tests and
// sampled modes use this instead to stay reproducible everywhere.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw error("bounded_draw: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace corrx

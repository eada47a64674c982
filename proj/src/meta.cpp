#include "hfsense/meta.hpp"

#include "hfsense/csv.hpp"
#include "hfsense/version.hpp"

namespace hfsense {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string ArtifactMeta::line() const {
  return std::string("hfsense ") + kVersion + " config=" + to_hex16(config_hash) +
         " seed=" + csv::fmt(seed);
}

}  // namespace hfsense

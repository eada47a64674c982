#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hfsense {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string to_hex16(std::uint64_t v);

// Stamp written as the first line of every artifact file.
struct ArtifactMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string line() const;
};

}  // namespace hfsense

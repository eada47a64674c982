#pragma once

namespace hfsense {
inline constexpr const char* kVersion = "0.1.0";
}

#pragma once

namespace chansim {
inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "chansim";
}  // namespace chansim

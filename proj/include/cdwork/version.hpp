#pragma once

namespace cdwork {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cdwork

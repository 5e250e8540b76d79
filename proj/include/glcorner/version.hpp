#pragma once

namespace glc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace glc

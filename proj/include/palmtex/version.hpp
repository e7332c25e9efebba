#pragma once

namespace palmtex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace palmtex

#pragma once

namespace sfbm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sfbm

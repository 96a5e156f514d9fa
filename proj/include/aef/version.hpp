#pragma once

namespace aef {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aef

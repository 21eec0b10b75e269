#pragma once

namespace washscan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace washscan

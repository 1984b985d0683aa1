#pragma once

namespace vfmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vfmc

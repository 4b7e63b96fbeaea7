#pragma once

namespace nbcpp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nbcpp

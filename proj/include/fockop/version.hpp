#pragma once

#include <string_view>

namespace fockop {

inline constexpr std::string_view kToolName = "fockop";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace fockop

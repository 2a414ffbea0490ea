#pragma once

#include <string_view>

namespace ci3sat {

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace ci3sat

#pragma once

namespace spinsim {

inline constexpr const char* version = "0.1.0";

}  // namespace spinsim

#pragma once

namespace phaseopt {

inline constexpr const char* version = "0.1.0";

}  // namespace phaseopt

#pragma once

namespace smc {

inline constexpr const char* kVersion = "1.0.0";

}

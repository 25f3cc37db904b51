#pragma once

namespace qpcalc {
inline constexpr const char* kEngineName = "qpcalc";
inline constexpr const char* kEngineVersion = "0.1.0";
}

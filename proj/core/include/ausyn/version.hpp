#pragma once

namespace ausyn {

inline constexpr const char* kToolName = "ausyn";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ausyn

#pragma once

namespace ur {

inline constexpr const char* kToolName = "ur";
inline constexpr const char* kToolVersion = "1.0.0";

} // namespace ur

#pragma once

namespace transport {

inline constexpr const char* kToolName = "trialtransport";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace transport

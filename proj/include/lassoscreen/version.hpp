#pragma once

namespace lassoscreen {

inline constexpr const char* kToolName = "lassoscreen";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace lassoscreen

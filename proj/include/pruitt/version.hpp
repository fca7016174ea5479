#pragma once

namespace pruitt {

inline constexpr const char* kToolName = "pruitt-lab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace pruitt

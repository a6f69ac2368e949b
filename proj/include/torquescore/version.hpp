#pragma once

namespace torquescore {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kModelFormat = "torquescore-model v1";
inline constexpr const char* kMotionFormat = "torquescore-motion v1";

}  // namespace torquescore

#pragma once

namespace post {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace post

#pragma once

namespace ulrrm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ulrrm

#pragma once

namespace cmcut {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cmcut

#pragma once

namespace catsurf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace catsurf

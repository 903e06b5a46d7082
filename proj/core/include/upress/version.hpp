#pragma once

namespace upress {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace upress

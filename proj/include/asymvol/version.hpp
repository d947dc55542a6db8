#pragma once

namespace asymvol {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace asymvol

#pragma once

namespace cosmem {

inline constexpr const char* kVersion = "0.1.0";

} // namespace cosmem

#pragma once

namespace mf {

inline constexpr const char* version = "1.0.0";

} // namespace mf

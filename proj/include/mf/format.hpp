#pragma once

#include <charconv>
#include <string>

namespace mf {

/// Shortest decimal form that round-trips to the same double.
inline std::string fmt(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace mf

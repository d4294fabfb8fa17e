#pragma once

#include <charconv>
#include <string>

namespace entrex {

/// Shortest round-trip decimal representation; keeps emitted CSV/JSON both
/// byte-deterministic and loss-free under re-parsing.
inline std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace entrex

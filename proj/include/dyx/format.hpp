// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_FORMAT_HPP
#define DYX_FORMAT_HPP

#include <charconv>
#include <string>

namespace dyx {

// Shortest round-trip decimal form; locale independent, so emitted files
// are byte-stable across runs and machines.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace dyx

#endif

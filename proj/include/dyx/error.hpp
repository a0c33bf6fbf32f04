// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_ERROR_HPP
#define DYX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dyx {

enum class errc {
    invalid_argument = 1,  // caller violated a precondition
    parse_error      = 2,  // malformed input data
    domain_error     = 3,  // data admissible but statistically degenerate
    numeric_error    = 4,  // quadrature/optimizer failed to meet its contract
    io_error         = 5,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace dyx

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace dzp {

// Bad input: malformed files, out-of-range parameters, contract violations
// by the caller. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A broken internal invariant (e.g. a filtration position that is not a
// subcomplex of its neighbor). The CLI maps this to exit code 2.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dzp

#pragma once

#include <stdexcept>
#include <string>

namespace machlimit {

// Bad user input: configuration values, malformed parameters, precondition
// violations detectable before any numerics run.  CLI maps this to exit 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The evolving state left the admissible region (vacuum proximity, NaN, sup
// bound).  CLI maps this to exit 3.
struct StateSpaceViolation : std::runtime_error {
    StateSpaceViolation(std::string field_name, double margin_value, const std::string& what)
        : std::runtime_error(what), field(std::move(field_name)), margin(margin_value) {}
    std::string field;
    double margin;
};

// A check-* command assertion failed.  CLI maps this to exit 4.
struct CheckFailure : std::runtime_error {
    explicit CheckFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace machlimit

#pragma once

#include <stdexcept>
#include <string>

namespace quarterwave {

/// Bad user input: malformed configuration, out-of-range parameter.
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation could not deliver the promised accuracy. Exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 1+B(k) is numerically singular: k sits on (or very near) a bound state
/// or a point of the exceptional set.
class NearSingularError : public NumericalError {
public:
    NearSingularError(const std::string& what, double condition)
        : NumericalError(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace quarterwave

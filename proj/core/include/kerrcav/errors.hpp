#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kerrcav {

// Input violated a documented precondition (e.g. non-Hermitian matrix handed
// to the Hermitian eigensolver).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Two operands live in different truncated spaces.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Fixed-step integration would be unstable at the requested step count.
class StabilityError : public std::runtime_error {
public:
    StabilityError(const std::string& what, std::size_t required_steps)
        : std::runtime_error(what), required_steps_(required_steps) {}

    std::size_t required_steps() const noexcept { return required_steps_; }

private:
    std::size_t required_steps_;
};

// Dense Liouvillian would exceed the configured size guard.
class MemoryGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kerrcav

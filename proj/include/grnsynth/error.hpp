// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grnsynth {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched domains between a space, a weight function and a state,
/// or a malformed space.
class StructuralError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at offset " + std::to_string(position) + ")"), position_(position)
    {
    }

    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// A formula or constraint refers to a gene or variable that is not bound.
class BindingError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// Exact enumeration would exceed the configured grid budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

} // namespace grnsynth

#ifndef DUALPATH_ERROR_HPP
#define DUALPATH_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dualpath
{

/// Malformed or out-of-range input. Maps to CLI exit code 1.
class InvalidInput : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Input text that could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public InvalidInput
{
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : InvalidInput(line ? "line " + std::to_string(line) + ": " + what : what)
        , line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Inputs that are individually well-formed but inconsistent with each other
/// or with a requested strictness. Maps to CLI exit code 2.
class ConsistencyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or record counts that disagree with each other.
class DimensionError : public ConsistencyError
{
public:
    using ConsistencyError::ConsistencyError;
};

/// Raised when a derivative is requested at a point where it does not exist.
class NotDifferentiable : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

} // namespace dualpath

#endif // DUALPATH_ERROR_HPP

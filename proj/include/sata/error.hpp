#pragma once

#include <stdexcept>
#include <string>

namespace sata {

/// Malformed generator spec, run configuration, or cost parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A file did not conform to its on-disk format.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A well-formed object violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sata

#pragma once

#include <stdexcept>
#include <string>

namespace opdkit {

/// Bad input: mismatched lengths, invalid parameters, malformed files.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The numerics could not produce a trustworthy result (e.g. a Gram system
/// that stays singular after regularization).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace opdkit

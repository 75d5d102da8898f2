#pragma once

#include <stdexcept>
#include <string>

namespace qwave {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Wrong representation flag, mismatched grids and similar caller mistakes.
class ContractError : public Error {
public:
    using Error::Error;
};

// A numeric parameter outside the documented range.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Improper integral that does not converge.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Workload exceeds a configured size budget.
class SizeError : public Error {
public:
    using Error::Error;
};

// Malformed or truncated field container.
class LoadError : public Error {
public:
    using Error::Error;
};

}  // namespace qwave

#pragma once

#include <stdexcept>
#include <string>

namespace dualctx {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller violated an operation precondition (bad parameter, out-of-range cursor).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Input data is malformed or inconsistent (schema violations, dangling ids, corrupt files).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace dualctx

#pragma once

#include <stdexcept>
#include <string>

namespace demosel {

/// Runtime failure inside a module (generator failures, inconsistent state).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or missing input: unreadable files, malformed records, invalid
/// configuration. The CLI maps these to exit status 2.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace demosel

#ifndef BAL_ERROR_HPP
#define BAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bal {

// Base class for every error the engine raises on bad data or bad
// parameters. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violated by caller-supplied parameters.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace bal

#endif  // BAL_ERROR_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace vlcalloc {

/// Raised for invalid inputs, malformed files and violated preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vlcalloc

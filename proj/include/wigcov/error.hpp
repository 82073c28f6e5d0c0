#pragma once

#include <stdexcept>
#include <string>

namespace wigcov {

// Base error for every contract violation raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured resource cap (enumeration size, moment order, matrix size) was exceeded.
class CapExceeded : public Error {
public:
    using Error::Error;
};

// Malformed or semantically invalid configuration. `pointer` is a JSON pointer
// to the offending field ("" for the document root).
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& what)
        : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(what);
}

} // namespace wigcov

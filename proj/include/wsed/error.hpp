#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace wsed {

// Error categories used across the toolkit. All carry a human-readable
// message; parse/decode errors include the offending line or byte offset.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {
inline void msg_append(std::ostringstream&) {}

template <typename T, typename... Rest>
void msg_append(std::ostringstream& os, const T& head, const Rest&... rest) {
    os << head;
    msg_append(os, rest...);
}
}  // namespace detail

template <typename... Parts>
std::string msg(const Parts&... parts) {
    std::ostringstream os;
    detail::msg_append(os, parts...);
    return os.str();
}

}  // namespace wsed

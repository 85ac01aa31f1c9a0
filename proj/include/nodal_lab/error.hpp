#pragma once

#include <stdexcept>
#include <string>

namespace nodal_lab {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    invalid_input,  // precondition violated by the caller
    geometry,       // mesh/surgery cannot be realized
    numerical,      // solver did not converge, singular operator, ...
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::invalid_input, what);
}

}  // namespace nodal_lab

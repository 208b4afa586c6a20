#pragma once

#include <stdexcept>
#include <string>

namespace meanquad {

// Failure categories surfaced across the C API boundary as error codes.
enum class Status {
    ok = 0,
    parse_error,      // bad expression or config text
    config_error,     // schema-valid text, invalid contents
    eval_error,       // domain error while evaluating an expression
    numeric_error,    // solver/refinement failure
    tolerance_error,  // result produced but outside the requested tolerance
};

class Error : public std::runtime_error {
public:
    Error(Status status, std::string message, long position = -1)
        : std::runtime_error(std::move(message)), status_(status), position_(position) {}

    Status status() const { return status_; }

    // Character offset for parse errors, -1 otherwise.
    long position() const { return position_; }

private:
    Status status_;
    long position_;
};

inline Error parse_error(std::string message, long position) {
    return Error(Status::parse_error, std::move(message), position);
}

inline Error config_error(std::string message) {
    return Error(Status::config_error, std::move(message));
}

inline Error eval_error(std::string message) {
    return Error(Status::eval_error, std::move(message));
}

inline Error numeric_error(std::string message) {
    return Error(Status::numeric_error, std::move(message));
}

inline Error tolerance_error(std::string message) {
    return Error(Status::tolerance_error, std::move(message));
}

}  // namespace meanquad

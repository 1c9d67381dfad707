#pragma once

#include <stdexcept>
#include <string>

namespace oi {

// Input errors (bad files, mismatched vocabularies, ...) map to exit code 1,
// guard violations to exit code 2.
enum class ErrorKind { Input, Guard };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error input_error(std::string msg) { return Error(ErrorKind::Input, std::move(msg)); }
inline Error guard_error(std::string msg) { return Error(ErrorKind::Guard, std::move(msg)); }

} // namespace oi

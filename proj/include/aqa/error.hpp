#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aqa {

/// Failure category, printed by the CLI as the first field of its one-line
/// error message.
enum class ErrorKind { invalid_argument, data, io, config, numeric };

[[nodiscard]] constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::data: return "data";
        case ErrorKind::io: return "io";
        case ErrorKind::config: return "config";
        case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace aqa

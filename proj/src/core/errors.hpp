#pragma once

#include <stdexcept>
#include <string>

namespace sphereflow {

/// Coarse error category, used by the C API and the CLI to map failures
/// to status/exit codes: invalid_argument -> 1, numeric -> 2.
enum class errc {
    invalid_argument = 1,
    numeric = 2,
};

/// Library error carrying a category and a short stable tag ("ZeroNorm",
/// "NotSymmetric", ...) that callers can match on without string parsing
/// of the human-readable message.
class error : public std::runtime_error {
public:
    error(errc code, std::string tag, std::string message)
        : std::runtime_error(tag + ": " + message),
          code_(code),
          tag_(std::move(tag)),
          message_(std::move(message)) {}

    errc code() const noexcept { return code_; }
    const std::string& tag() const noexcept { return tag_; }
    /// Message without the tag prefix (what() carries "tag: message").
    const std::string& message() const noexcept { return message_; }

private:
    errc code_;
    std::string tag_;
    std::string message_;
};

[[noreturn]] inline void throw_invalid(const char* tag, const std::string& message) {
    throw error(errc::invalid_argument, tag, message);
}

[[noreturn]] inline void throw_numeric(const char* tag, const std::string& message) {
    throw error(errc::numeric, tag, message);
}

} // namespace sphereflow

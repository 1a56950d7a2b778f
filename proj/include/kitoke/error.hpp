#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kitoke {

// Broad failure classes; the CLI maps each one onto an exit code.
enum class ErrorKind {
    invalid_argument,
    io,
    format,
    numeric,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string stage = {});

    ErrorKind kind() const noexcept { return kind_; }
    // Pipeline stage that raised the error, empty outside compress().
    const std::string& stage() const noexcept { return stage_; }

private:
    ErrorKind kind_;
    std::string stage_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

} // namespace kitoke

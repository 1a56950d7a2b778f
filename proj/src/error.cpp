#include "kitoke/error.hpp"

#include <utility>

namespace kitoke {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string stage)
    : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

} // namespace kitoke

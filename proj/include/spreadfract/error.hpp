#ifndef SPREADFRACT_ERROR_HPP
#define SPREADFRACT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace spreadfract {

/// Failure category. The CLI maps these onto process exit codes.
enum class ErrorKind {
    format,            // unreadable header or field
    ordering,          // timestamps out of order
    io,                // file could not be opened or written
    config,            // option outside its valid range
    insufficient_data, // too few points for the requested operation
    degenerate,        // zero variance, zero residuals, undefined pattern
    type_misuse,       // signal of the wrong kind passed to an operation
    invariant          // internal consistency check failed
};

inline const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::ordering: return "ordering";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::type_misuse: return "type-misuse";
    case ErrorKind::invariant: return "invariant";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace spreadfract

#endif // SPREADFRACT_ERROR_HPP

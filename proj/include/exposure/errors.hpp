#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace exposure {

// Base for every failure the engine reports. `kind()` is the stable error
// class name surfaced by the CLI and the HTTP API.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept = 0;
};

#define EXPOSURE_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                              \
    public:                                                                  \
        using Error::Error;                                                  \
        const char* kind() const noexcept override { return #Name; }         \
    };

// Malformed input document. Carries a 1-based line and column when known.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"
                     : what),
          line_(line),
          column_(column) {}

    const char* kind() const noexcept override { return "SyntaxError"; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

EXPOSURE_DEFINE_ERROR(SchemaError)
EXPOSURE_DEFINE_ERROR(IntegrityError)
EXPOSURE_DEFINE_ERROR(RangeError)
EXPOSURE_DEFINE_ERROR(ConflictError)
EXPOSURE_DEFINE_ERROR(UnknownNodeError)
EXPOSURE_DEFINE_ERROR(EmptyMappingError)
EXPOSURE_DEFINE_ERROR(DomainError)
EXPOSURE_DEFINE_ERROR(DimensionError)
EXPOSURE_DEFINE_ERROR(ConvergenceError)
EXPOSURE_DEFINE_ERROR(InsufficientPointsError)
EXPOSURE_DEFINE_ERROR(EmptyCorpusError)
EXPOSURE_DEFINE_ERROR(NotFoundError)
EXPOSURE_DEFINE_ERROR(IoError)

#undef EXPOSURE_DEFINE_ERROR

// Converts a byte offset into a 1-based (line, column) pair.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace exposure

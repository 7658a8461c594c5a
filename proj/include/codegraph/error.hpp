#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace codegraph {

// Base class for every recoverable domain error. `code` is a stable
// machine-readable identifier used by the CLI's JSON diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

class ParseError : public Error {
public:
    ParseError(int line, int column, std::string expected, const std::string& message)
        : Error("parse_error", message),
          line(line), column(column), expected(std::move(expected)) {}

    int line;
    int column;
    std::string expected;
};

class EmptyBodyError : public Error {
public:
    explicit EmptyBodyError(const std::string& message = "method body has no statements")
        : Error("empty_body", message) {}
};

class FormatError : public Error {
public:
    FormatError(std::string path, long line, const std::string& message)
        : Error("format_error", message), path(std::move(path)), line(line) {}

    std::string path;
    long line; // 1-based; 0 when not tied to a specific line
};

class VocabularyMissError : public Error {
public:
    explicit VocabularyMissError(const std::string& message)
        : Error("vocabulary_miss", message) {}
};

class ShapeMismatchError : public Error {
public:
    explicit ShapeMismatchError(const std::string& message)
        : Error("shape_mismatch", message) {}
};

class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& message)
        : Error("non_finite", message) {}
};

class InsufficientFunctionalitiesError : public Error {
public:
    explicit InsufficientFunctionalitiesError(const std::string& message)
        : Error("insufficient_functionalities", message) {}
};

class InsufficientNegativesError : public Error {
public:
    explicit InsufficientNegativesError(const std::string& message)
        : Error("insufficient_negatives", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io_error", message) {}
};

} // namespace codegraph

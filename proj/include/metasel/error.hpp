#pragma once

#include <cstddef>
#include <exception>
#include <string>
#include <utility>

namespace metasel {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorClass { usage, data, numerical };

class Error : public std::exception {
public:
    Error(ErrorClass cls, std::string what) : message_(std::move(what)), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }
    const char* what() const noexcept override { return message_.c_str(); }

    /// Prefixes the message in place; use with `throw;` to keep the dynamic type.
    void add_context(const std::string& context) { message_ = context + ": " + message_; }

private:
    std::string message_;
    ErrorClass cls_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorClass::data, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class PairingError : public Error {
public:
    explicit PairingError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class ManifestError : public Error {
public:
    explicit ManifestError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorClass::usage, what) {}
};

class InvalidLabelError : public Error {
public:
    explicit InvalidLabelError(const std::string& what) : Error(ErrorClass::data, what) {}
};

/// All points coincide, so the model has no extent to normalize.
class DegenerateModelError : public Error {
public:
    explicit DegenerateModelError(const std::string& what) : Error(ErrorClass::data, what) {}
};

/// A part label is missing, so S*S^T is singular.
class DegenerateSemanticsError : public Error {
public:
    explicit DegenerateSemanticsError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

class ZeroVectorError : public Error {
public:
    explicit ZeroVectorError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

class EmptyEvaluationError : public Error {
public:
    explicit EmptyEvaluationError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

} // namespace metasel

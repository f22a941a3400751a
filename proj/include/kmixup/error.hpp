#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmixup {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed inputs: non-finite values, bad dimensions.
class InputError : public Error {
public:
    using Error::Error;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class DatasetTooSmall : public Error {
public:
    using Error::Error;
};

// A theorem's hypotheses do not hold for the requested configuration.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class CsvError : public Error {
public:
    CsvError(const std::string& what, std::size_t row) : Error(what), row_(row) {}
    /// 1-based line number in the file (header is line 1); 0 when not row-specific.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class FileNotFound : public CsvError {
public:
    explicit FileNotFound(const std::string& path) : CsvError("file not found: " + path, 0) {}
};

class RaggedRow : public CsvError {
public:
    using CsvError::CsvError;
};

class NonNumericField : public CsvError {
public:
    using CsvError::CsvError;
};

class EmptyDataset : public CsvError {
public:
    explicit EmptyDataset(const std::string& what) : CsvError(what, 0) {}
};

}  // namespace kmixup

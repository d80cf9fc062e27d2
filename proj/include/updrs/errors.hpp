#pragma once

#include <stdexcept>
#include <string>

namespace updrs {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorCategory {
  Data,           // bad or unsuitable input data
  Configuration,  // bad parameters or options
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Configuration, what) {}
};

class MissingFile : public DataError {
 public:
  explicit MissingFile(const std::string& path)
      : DataError("cannot open data file '" + path + "'"), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class SchemaMismatch : public DataError {
 public:
  explicit SchemaMismatch(const std::string& column, const std::string& detail)
      : DataError("schema mismatch on column '" + column + "': " + detail), column_(column) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, std::string column, const std::string& cell)
      : DataError("row " + std::to_string(row) + ", column '" + column +
                  "': cannot parse '" + cell + "' as a number"),
        row_(row),
        column_(std::move(column)) {}
  /// Zero-based data row index (the header is not counted).
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class RangeError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class EmptySubset : public DataError {
 public:
  using DataError::DataError;
};

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class NonFiniteQuery : public DataError {
 public:
  using DataError::DataError;
};

class TooFewRows : public DataError {
 public:
  using DataError::DataError;
};

class InvalidK : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class BadFoldSpec : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidParams : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace updrs

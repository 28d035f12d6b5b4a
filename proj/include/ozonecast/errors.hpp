#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ozonecast {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A required column is missing or an unknown column was referenced.
class SchemaError : public Error {
  public:
    using Error::Error;
};

/// A cell or date could not be parsed. Carries the 1-based file line.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class DuplicateDateError : public Error {
  public:
    using Error::Error;
};

/// A gap run exceeds the allowed maximum length.
class GapRunError : public Error {
  public:
    GapRunError(const std::string& column, std::size_t start, std::size_t length)
        : Error("column " + column + ": gap run of length " + std::to_string(length) +
                " starting at row " + std::to_string(start)),
          column_(column), start_(start), length_(length) {}
    const std::string& column() const { return column_; }
    std::size_t start() const { return start_; }
    std::size_t length() const { return length_; }

  private:
    std::string column_;
    std::size_t start_;
    std::size_t length_;
};

/// A column's total gap fraction exceeds the allowed budget.
class GapBudgetError : public Error {
  public:
    explicit GapBudgetError(const std::string& column, double fraction)
        : Error("column " + column + ": gap fraction " + std::to_string(fraction) +
                " exceeds budget"),
          column_(column) {}
    const std::string& column() const { return column_; }

  private:
    std::string column_;
};

class SplitError : public Error {
  public:
    using Error::Error;
};

class StatError : public Error {
  public:
    using Error::Error;
};

class FeatureError : public Error {
  public:
    using Error::Error;
};

class FitError : public Error {
  public:
    using Error::Error;
};

class PredictError : public Error {
  public:
    using Error::Error;
};

class MetricError : public Error {
  public:
    using Error::Error;
};

/// Training produced a non-finite loss. Carries the offending epoch.
class DivergenceError : public Error {
  public:
    explicit DivergenceError(int epoch)
        : Error("non-finite loss at epoch " + std::to_string(epoch)), epoch_(epoch) {}
    int epoch() const { return epoch_; }

  private:
    int epoch_;
};

}  // namespace ozonecast

#pragma once

#include <stdexcept>
#include <string>

namespace fcost {

// Failure categories. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  schema = 2,
  data = 3,
  config = 4,
  estimation = 5,
  statistics = 6,
  io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& what) : Error(ErrorCategory::schema, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

// A model record that lacks every chip-hour derivation path.
struct UnderdeterminedRecord : Error {
  explicit UnderdeterminedRecord(const std::string& model)
      : Error(ErrorCategory::data, "underdetermined record: " + model) {}
};

struct NoPricePath : Error {
  explicit NoPricePath(const std::string& hardware)
      : Error(ErrorCategory::estimation, "no price path for hardware: " + hardware) {}
};

struct NoApplicablePrice : Error {
  explicit NoApplicablePrice(const std::string& model)
      : Error(ErrorCategory::estimation, "no applicable price for model: " + model) {}
};

struct InsufficientData : Error {
  explicit InsufficientData(const std::string& what)
      : Error(ErrorCategory::statistics, "insufficient data: " + what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::statistics, "domain error: " + what) {}
};

struct TestUnavailable : Error {
  explicit TestUnavailable(const std::string& what)
      : Error(ErrorCategory::statistics, "test unavailable: " + what) {}
};

struct IncompleteVariableSet : Error {
  explicit IncompleteVariableSet(const std::string& variable)
      : Error(ErrorCategory::config, "incomplete variable set: missing " + variable) {}
};

}  // namespace fcost

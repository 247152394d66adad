#pragma once

#include <stdexcept>
#include <string>

namespace breathkit {

// Exit-code classes used by the command line tool: validation = 1, I/O = 2,
// numerical = 3.

class ValidationError : public std::runtime_error
{
public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)),
        message_(message)
  {}

  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::string field_;
  std::string message_;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation cannot produce a trustworthy result, e.g. an
/// unstable filter design or a window/hop pair that is not constant overlap-add.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace breathkit

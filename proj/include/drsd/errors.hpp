#pragma once

#include <stdexcept>
#include <string>

namespace drsd {

// Argument outside the domain of an operation (negative time, empty grid, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A user-supplied comparison function or certificate failed validation.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Measurement schedule or trace contents inconsistent with the dual-rate protocol.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed configuration, unknown registry id, bad expression.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integration blew up or produced non-finite values. `escape_time` is the
// time (relative to the start of the failing step) at which it was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double escape_time)
      : std::runtime_error(what), escape_time_(escape_time) {}

  double escape_time() const noexcept { return escape_time_; }

 private:
  double escape_time_;
};

}  // namespace drsd

#ifndef DYADIC_ERRORS_HPP
#define DYADIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dyadic {

// Thrown when an input violates a documented precondition. The message names
// the violated constraint so callers can surface it verbatim.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown on malformed or unreadable files (config, instance, ledger).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a freshly computed suite maximum exceeds its ledger entry
// beyond the allowed slack.
class ledger_regression : public std::runtime_error {
 public:
  explicit ledger_regression(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dyadic

#endif

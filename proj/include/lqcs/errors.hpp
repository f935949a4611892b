#ifndef LQCS_ERRORS_HPP
#define LQCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lqcs {

// Invalid argument / violated precondition. CLI maps this to exit code 2.
class domain_error : public std::invalid_argument {
 public:
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// A requested computation exceeds a configured enumeration or size budget.
// The message names the cheaper alternative when one exists. Exit code 3.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Internal numerical failure (rank deficiency, non-finite values mid-flight).
// Exit code 4.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lqcs

#endif  // LQCS_ERRORS_HPP

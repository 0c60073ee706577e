#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace recount {

// One broken invariant. `district` is set when the violation is local to a
// district (0-based index).
struct Violation {
  std::optional<std::size_t> district;
  std::string constraint;
  std::string detail;

  std::string to_string() const;
};

// Input does not satisfy the model invariants (bad election, manipulation,
// recount set or instance file).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  ValidationError(std::string constraint, std::string detail,
                  std::optional<std::size_t> district = std::nullopt);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// A search or table exceeded its configured cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The solver does not support this input (wrong rule, weighted instance,
// missing preferred candidate, non-regular manipulation, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace recount

// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace fairstakes {

// A scenario or other input that fails schema or semantic validation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A mechanism construction step that cannot be completed for the given
// environment, e.g. equal stakes requested when one group's cost
// distribution strictly dominates the other's.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairstakes

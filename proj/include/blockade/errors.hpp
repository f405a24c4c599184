#pragma once

#include <stdexcept>
#include <string>

namespace blockade {

// A physical parameter or argument is outside its documented domain.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Two operands disagree on their subsystem layout.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// An operation would populate a Fock level above the mode cutoff.
class CutoffOverflow : public std::out_of_range {
 public:
  explicit CutoffOverflow(const std::string& what) : std::out_of_range(what) {}
};

// The input state violates an operation's precondition (e.g. a logical
// gate applied to a state with population outside {g, s}).
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace blockade

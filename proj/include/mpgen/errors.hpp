#pragma once

#include <stdexcept>
#include <string>

namespace mpgen {

/// Caller broke a documented precondition (wrong state dimension, mismatched lattice ids, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Vehicle model evaluated outside its region of validity (jack-knife).
class ModelDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EquilibriumNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: parameters, lattice, maneuver file, CLI options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InterpretationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Planning query that cannot be posed on the given primitive set.
class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpgen

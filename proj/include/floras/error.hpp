#pragma once

#include <stdexcept>
#include <string>

namespace floras {

// Invalid experiment or protocol configuration (bad key, B <= C, N < K, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A call-site contract was violated (index out of range, dimension mismatch).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or missing input data, e.g. a truncated IDX file.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A client differential with zero spread around its mean cannot be normalized.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A channel estimate of exactly zero makes the projector undefined.
class SingularEstimateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// No parameter choice inside the search range meets the requested target.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace floras

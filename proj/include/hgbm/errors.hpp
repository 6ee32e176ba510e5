#pragma once

#include <stdexcept>
#include <string>

namespace hgbm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid (n, k) or mismatched block sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a map (non-contraction, lambda = 1, divergent series).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Group element too far from the constraint manifold to reproject.
class ProjectionError : public Error {
 public:
  using Error::Error;
};

// A single discretization step left the admissible set; the caller refines dt.
class StepRejected : public Error {
 public:
  using Error::Error;
};

// Z block numerically singular after a group step.
class DegenerateStepError : public StepRejected {
 public:
  DegenerateStepError(const std::string& what, double condition)
      : StepRejected(what), condition_number(condition) {}
  double condition_number;
};

// A step was still rejected after the maximum number of dt halvings; the path is failed.
class RefinementExhausted : public Error {
 public:
  using Error::Error;
};

// Quadrature or series did not reach the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgbm

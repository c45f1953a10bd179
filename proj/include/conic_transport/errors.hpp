// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conic_transport {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cone fails the pointedness or interior requirement.
class DegenerateCone : public Error {
 public:
  using Error::Error;
};

/// |<u,v>| below the 1e-12 threshold; the log-cost is not trustworthy here.
class NearOrthogonal : public Error {
 public:
  using Error::Error;
};

/// Marginal weight sums differ beyond tolerance.
class InfeasibleMarginals : public Error {
 public:
  using Error::Error;
};

/// Instance exceeds a hard size guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// Requested plane does not meet the body.
class EmptySection : public Error {
 public:
  using Error::Error;
};

/// A post-construction certificate check failed (numerical tolerance breach).
class CertificateFailure : public Error {
 public:
  using Error::Error;
};

/// Operation requires an exact geometric query unavailable in this dimension.
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or unknown schema field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Pairing admits a negative exchange cycle; no pseudo-cone can contain it.
class NotMonotone : public Error {
 public:
  NotMonotone(const std::string& msg, std::vector<std::size_t> cycle, double weight)
      : Error(msg), cycle_(std::move(cycle)), weight_(weight) {}

  const std::vector<std::size_t>& cycle() const { return cycle_; }
  double cycle_weight() const { return weight_; }

 private:
  std::vector<std::size_t> cycle_;
  double weight_ = 0.0;
};

}  // namespace conic_transport

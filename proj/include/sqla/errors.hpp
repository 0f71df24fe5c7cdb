#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqla {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling was requested from a vector with zero norm.
class EmptySupport : public Error {
 public:
  EmptySupport() : Error("sampling from a vector with zero norm") {}
};

class IndexOutOfRange : public Error {
 public:
  IndexOutOfRange(std::size_t index, std::size_t dim)
      : Error("index " + std::to_string(index) + " outside [1, " + std::to_string(dim) + "]") {}
};

class DuplicateIndex : public Error {
 public:
  explicit DuplicateIndex(std::size_t index)
      : Error("duplicate sparse index " + std::to_string(index)) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// A uniform-rejection handle met an index whose acceptance probability exceeds one.
class AcceptanceBoundViolated : public Error {
 public:
  AcceptanceBoundViolated(std::size_t index, double probability)
      : Error("acceptance probability " + std::to_string(probability) + " > 1 at index " +
              std::to_string(index) + " (bound C too small)"),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class InconsistentOracle : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling used up its attempt budget without an accepted draw.
class AbortedAfterBudget : public Error {
 public:
  explicit AbortedAfterBudget(std::size_t attempts)
      : Error("rejection sampling aborted after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

class ZeroImage : public Error {
 public:
  ZeroImage() : Error("Vw is the zero vector") {}
};

class InvalidEpsilon : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class SingularSigma : public Error {
 public:
  SingularSigma() : Error("zero singular value in description") {}
};

/// The low-rank stage kept fewer than k singular values.
class InsufficientRank : public Error {
 public:
  InsufficientRank(std::size_t rank, std::size_t wanted)
      : Error("low-rank description has rank " + std::to_string(rank) + " < k = " +
              std::to_string(wanted)),
        rank_(rank) {}
  std::size_t rank() const { return rank_; }

 private:
  std::size_t rank_;
};

class SpectrumViolation : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqla

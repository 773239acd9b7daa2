#ifndef PF_ERRORS_HPP
#define PF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pf {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every log-weight is -inf (or the weight vector is empty).
class AllWeightsDegenerate : public Error {
 public:
  using Error::Error;
};

/// A probability vector handed to a resampler is not a probability vector.
class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

/// A filter step produced no usable weight. Carries the zero-based step index.
class WeightCollapse : public Error {
 public:
  WeightCollapse(std::size_t step, const std::string& what)
      : Error("weight collapse at step " + std::to_string(step) + ": " + what), step_(step) {}

  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class InvalidScale : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularInnovationCovariance : public Error {
 public:
  using Error::Error;
};

class ZeroLikelihoodObservation : public Error {
 public:
  using Error::Error;
};

class NotYetFiltered : public Error {
 public:
  NotYetFiltered() : Error("no observation has been filtered yet") {}
};

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path) : Error("cannot open file: " + path) {}
};

/// Malformed CSV input. `line()` is one-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pf

#endif  // PF_ERRORS_HPP

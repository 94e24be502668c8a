#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace roc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Equation solvers.
class NonStabilizable : public Error {
 public:
  using Error::Error;
};
class IllConditioned : public Error {
 public:
  using Error::Error;
};
class UnstableF : public Error {
 public:
  using Error::Error;
};
class NotPsd : public Error {
 public:
  using Error::Error;
};

// Controller synthesis.
class SingularPivot : public Error {
 public:
  using Error::Error;
};
class UnstableResult : public Error {
 public:
  using Error::Error;
};
class BisectionFailure : public Error {
 public:
  using Error::Error;
};

// Frequency- and time-domain evaluation.
class UnstableLoop : public Error {
 public:
  using Error::Error;
};
class ResolventSingular : public Error {
 public:
  using Error::Error;
};
class NonFiniteState : public Error {
 public:
  using Error::Error;
};
class BadSpec : public Error {
 public:
  using Error::Error;
};

// Model ingestion.
class ParseError : public Error {
 public:
  using Error::Error;
};
class InvalidModel : public Error {
 public:
  using Error::Error;
};

}  // namespace roc

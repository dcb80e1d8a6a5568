#pragma once

#include <stdexcept>
#include <string>

namespace godel {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the working domain, or |D(r)| below the margin.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed profile specification or expression string.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Tangent map of an immersion is rank deficient or its induced metric degenerate.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Orthogonal complement of the tangent space is (numerically) lightlike.
class NullNormalError : public Error {
 public:
  using Error::Error;
};

/// Family parameters outside their admissible range (log/sqrt domains, ODE blow-up).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Catalog family requested on a profile where its hypotheses fail.
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration (flags or JSON document).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace godel

#pragma once

#include <stdexcept>
#include <string>

namespace gridshell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A transformation, parametrization or stiffness matrix hit a singular configuration.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Pseudo-orthogonality (D^T E D = E) lost to round-off after composing generators.
class NumericalContamination : public Error {
 public:
  using Error::Error;
};

/// A surface frame violated a geometric identity it must satisfy (curvature-line
/// orthogonality, equal kappa*A products, sphere/normal consistency).
class FrameInconsistency : public Error {
 public:
  using Error::Error;
};

/// The self-stress parameter cannot be fixed from the center condition.
class ConditionDegenerate : public Error {
 public:
  using Error::Error;
};

/// Wraps an error with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace gridshell

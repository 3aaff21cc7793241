#pragma once

#include <stdexcept>
#include <string>

namespace rrm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (base-point mismatch, index out
/// of range, empty input, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The Riemannian logarithm (or a transport along the minimizing geodesic)
/// was requested beyond the injectivity guard, or the shooting solver failed.
class OutsideInjectivityRadius : public Error {
 public:
  using Error::Error;
};

class UnsupportedRetraction : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// An update left the open domain of a Hessian-Riemannian manifold.
class DomainEscape : public Error {
 public:
  using Error::Error;
};

class NotCritical : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; `path()` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace rrm

#pragma once

#include <stdexcept>
#include <string>

namespace cstrans {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkewSymmetric : public Error {
 public:
  NotSkewSymmetric() : Error("matrix is not skew-symmetric") {}
};

class GimbalLock : public Error {
 public:
  GimbalLock() : Error("ZYX Euler extraction at pitch = +-pi/2") {}
};

class SingularConfiguration : public Error {
 public:
  explicit SingularConfiguration(const std::string& what = "P P^T is numerically singular")
      : Error(what) {}
};

class NegativeThrust : public Error {
 public:
  NegativeThrust() : Error("requested thrust is negative") {}
};

class NumericalBlowup : public Error {
 public:
  explicit NumericalBlowup(const std::string& what) : Error(what) {}
};

class DegenerateTension : public Error {
 public:
  DegenerateTension() : Error("desired tension norm below 1e-6 N") {}
};

class DegenerateForce : public Error {
 public:
  DegenerateForce() : Error("desired robot force norm below 1e-6 N") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class SchemaVersionMismatch : public Error {
 public:
  explicit SchemaVersionMismatch(const std::string& what) : Error(what) {}
};

class MalformedMessage : public Error {
 public:
  explicit MalformedMessage(const std::string& what) : Error(what) {}
};

}  // namespace cstrans

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fsi {

using Index = std::int32_t;
using Vec = std::vector<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

/// Raised when a file cannot be parsed; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A tetrahedron with non-positive Jacobian was met during evaluation.
class ElementInversion : public Error {
 public:
  ElementInversion(Index element, const std::string& what)
      : Error("element " + std::to_string(element) + ": " + what), element_(element) {}
  Index element() const noexcept { return element_; }

 private:
  Index element_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsi

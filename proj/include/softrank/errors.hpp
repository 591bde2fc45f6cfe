// Exception hierarchy shared by every module. All failures surface as typed
// exceptions carrying a formatted message; nothing fails silently.
#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace softrank {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension/shape disagreement between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Out-of-domain argument (tau <= 0, k out of range, bad config, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A vector that must have nonzero Euclidean norm does not.
class ZeroNormError : public Error {
 public:
  using Error::Error;
};

// Non-finite value encountered while evaluating a checked function.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Training loop produced a non-finite loss.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// File/stream problems.
class IoError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input document (missing fields, wrong types).
class SchemaError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Small message builder: msg("dim ", a, " != ", b).
template <typename... Parts>
std::string msg(Parts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

}  // namespace detail
}  // namespace softrank

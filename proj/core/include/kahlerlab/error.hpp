#pragma once

#include <stdexcept>
#include <string>

namespace kahlerlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (dimension, range, shape).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A quadrature produced a non-finite value or two routes disagree beyond tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A potential left the Kähler cone where positivity was required.
class NotKahler : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra step met a singular or badly conditioned matrix.
class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace kahlerlab

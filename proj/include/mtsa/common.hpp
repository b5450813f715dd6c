#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mtsa {

/// Shape mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unrecognized selector names or invalid configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN inputs, division by zero, non-finite intermediate results.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { relu, elu, tanh, sigmoid, log_sigmoid, identity };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation fn);

/// Entrywise activation. log_sigmoid is computed directly from log1p so it
/// stays finite for large negative inputs instead of taking log of an
/// underflowed sigmoid.
template <typename T>
inline T apply_activation(Activation fn, T x) {
  switch (fn) {
    case Activation::relu:
      return x > T(0) ? x : T(0);
    case Activation::elu:
      return x > T(0) ? x : std::expm1(x);
    case Activation::tanh:
      return std::tanh(x);
    case Activation::sigmoid:
      if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
      {
        const T e = std::exp(x);
        return e / (T(1) + e);
      }
    case Activation::log_sigmoid:
      return x >= T(0) ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
    case Activation::identity:
      return x;
  }
  throw ConfigError("unknown activation");
}

}  // namespace mtsa

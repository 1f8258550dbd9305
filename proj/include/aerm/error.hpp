#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aerm {

using Vector = std::vector<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid combination of inputs (bad family/loss pairing, bad B, bad level).
class ConfigurationError : public Error {
public:
  using Error::Error;
};

/// A parameter lies outside the parameter space it is evaluated on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The region does not meet the parameter space.
class EmptyRegionError : public Error {
public:
  using Error::Error;
};

/// The region kind / loss combination has no decision procedure.
class UnsupportedOperationError : public Error {
public:
  using Error::Error;
};

/// Every replicate produced an empty almost-minimizer set.
class UndefinedPlausibilityError : public Error {
public:
  using Error::Error;
};

/// No tolerance satisfies the sample-size premise at the given sample size.
class InfeasibleError : public Error {
public:
  InfeasibleError(const std::string& what, std::uint64_t min_m)
      : Error(what), min_m_(min_m) {}
  std::uint64_t min_m() const noexcept { return min_m_; }

private:
  std::uint64_t min_m_;
};

/// A sample-size requirement does not fit in 64 bits.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// The optimizer hit its iteration budget. Carries the best iterate found.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, Vector best, double best_value)
      : Error(what), best_(std::move(best)), best_value_(best_value) {}
  const Vector& best_iterate() const noexcept { return best_; }
  double best_value() const noexcept { return best_value_; }

private:
  Vector best_;
  double best_value_;
};

}  // namespace aerm

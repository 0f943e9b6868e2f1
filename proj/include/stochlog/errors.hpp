#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stochlog {

/// Caller supplied something the library cannot work with (bad shape, bad
/// flag, malformed file). The CLI maps this family to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class ArgumentError : public InputError {
 public:
  using InputError::InputError;
};

/// A documented precondition on numerical content was violated, e.g. a
/// matrix handed to a Hermitian kernel is not Hermitian.
class ContractError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(std::string location, const std::string& what)
      : InputError(location.empty() ? what : location + ": " + what),
        location_(std::move(location)),
        message_(what) {}

  const std::string& location() const noexcept { return location_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string location_;
  std::string message_;
};

/// The computation itself failed. Exit code 3 in the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what,
                   std::vector<std::complex<double>> partial)
      : NumericalError(what), partial_(std::move(partial)) {}

  /// Eigenvalues that had deflated before the iteration budget ran out.
  const std::vector<std::complex<double>>& partial() const noexcept {
    return partial_;
  }

  const std::optional<std::uint64_t>& sample_index() const noexcept {
    return sample_index_;
  }

  ConvergenceError at_sample(std::uint64_t index) const {
    ConvergenceError copy(std::string(what()) + " (sample " +
                              std::to_string(index) + ")",
                          partial_);
    copy.sample_index_ = index;
    return copy;
  }

 private:
  std::vector<std::complex<double>> partial_;
  std::optional<std::uint64_t> sample_index_;
};

class InsufficientDataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace stochlog

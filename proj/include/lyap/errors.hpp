#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lyap {

// Error with a stable machine-readable category string. The CLI maps
// ValidationError to exit code 2 and ConvergenceError to exit code 3.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative solver ran out of iterations; carries the tail of the
// residual/ratio trace for the report.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string category, const std::string& message,
                   std::vector<double> trace = {})
      : Error(std::move(category), message), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace lyap

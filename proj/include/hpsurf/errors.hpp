#pragma once

#include <stdexcept>
#include <string>

namespace hpsurf {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine failed to reach its stated accuracy or bracket.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for the fit-feasibility errors (mapped to one CLI exit code).
class InfeasibleFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoUncensoredData : public InfeasibleFit {
 public:
  NoUncensoredData() : InfeasibleFit("no observations fall inside the asymptotic regime") {}
};

class TooFewUncensored : public InfeasibleFit {
 public:
  TooFewUncensored(std::size_t got, std::size_t need)
      : InfeasibleFit("only " + std::to_string(got) + " observations inside the regime, need at least " +
                      std::to_string(need)) {}
};

class AllStartsFailed : public NumericFailure {
 public:
  AllStartsFailed() : NumericFailure("every optimizer start hit a numeric failure") {}
};

class EmptyRegion : public std::runtime_error {
 public:
  EmptyRegion() : std::runtime_error("consonance region is empty") {}
};

/// Malformed or missing input (files, flags, configs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hpsurf

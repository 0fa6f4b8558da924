#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tumorpf {

// Bad user input: config keys, grid mismatch, time-step bounds.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// NaN/Inf produced inside a time step.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::string stage, std::size_t step)
      : std::runtime_error("non-finite value after stage '" + stage + "' of step " +
                           std::to_string(step)),
        stage_(std::move(stage)),
        step_(step) {}

  const std::string& stage() const noexcept { return stage_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::string stage_;
  std::size_t step_;
};

// A maximum-bound or bound-preservation property failed beyond slack.
class StructureViolation : public std::runtime_error {
 public:
  StructureViolation(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace tumorpf

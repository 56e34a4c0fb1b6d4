#pragma once

#include <stdexcept>
#include <string>

namespace shl {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// A numerical routine could not reach its requested tolerance.
struct AccuracyError : std::runtime_error {
  explicit AccuracyError(const std::string& msg) : std::runtime_error(msg) {}
};

// A constructive procedure (shooting, root search, basis build) failed.
struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure inside a multi-stage pipeline, tagged with the stage name.
struct StageError : std::runtime_error {
  std::string stage;
  StageError(std::string stage_, const std::string& msg)
      : std::runtime_error(stage_ + ": " + msg), stage(std::move(stage_)) {}
};

}  // namespace shl

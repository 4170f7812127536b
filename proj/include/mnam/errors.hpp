#pragma once

#include <stdexcept>
#include <string>

namespace mnam {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent model/constraint specification.
struct SpecError : Error {
  using Error::Error;
};

// CSV parsing, schema mismatches, bad preprocessing inputs.
struct DataError : Error {
  using Error::Error;
};

// Divergence (NaN/Inf in the objective) or an exhausted escalation budget.
struct TrainingError : Error {
  using Error::Error;
};

}

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fjest {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy shared by the library and the CLI (which maps these onto
// process exit codes: usage=2, data=3, capacity=4).

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Size guards on the dense baselines.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoNeighborError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The push-based opinion estimator only supports unweighted regular graphs.
struct RegularityViolation : std::runtime_error {
  RegularityViolation(const std::string& what, std::int64_t vertex)
      : std::runtime_error(what), vertex(vertex) {}
  std::int64_t vertex;
};

struct BudgetExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fjest

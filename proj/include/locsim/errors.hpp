#pragma once

#include <stdexcept>
#include <string>

namespace locsim {

// Bad configuration or malformed input.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Coincident node/point geometry, for which no direction is defined.
struct DegenerateGeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Singular or non-finite linear algebra that the caller can act on
// (e.g. by supplying diagonal loading).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite value produced inside the iterative solver.
struct IterationAbort : NumericalError {
  IterationAbort(const std::string& what, int iteration_, int grid_index_)
      : NumericalError(what), iteration(iteration_), grid_index(grid_index_) {}
  int iteration;
  int grid_index;
};

}  // namespace locsim

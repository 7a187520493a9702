#pragma once

#include <stdexcept>
#include <string>

namespace nled {

/// Point (X, Y) left the validity region of a Lagrangian model, e.g. the
/// Born-Infeld square root argument became non-positive.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Newton iteration failed to reach the requested residual.
struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what, long cell = -1)
      : std::runtime_error(what), cell_index(cell) {}
  long cell_index;  // grid cell that failed, -1 if not grid-related
};

/// Requested time step exceeds the stability limit of the chosen scheme.
struct CFLViolation : std::runtime_error {
  explicit CFLViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Centroid fit rejected (R^2 below threshold, or window never traversed).
struct FitError : std::runtime_error {
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration file or inconsistent experiment parameters.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nled

#pragma once

#include <stdexcept>
#include <string>

namespace stekiso {

/// Base of every error raised by the library. `kind()` is a short stable
/// identifier that the CLI puts into its machine-readable error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what) : Error("invalid_input", what) {}
};

struct CapExceeded : Error {
  explicit CapExceeded(const std::string& what) : Error("cap_exceeded", what) {}
};

struct GeometryError : Error {
  explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

struct SolverError : Error {
  explicit SolverError(const std::string& what) : Error("solver", what) {}
};

// Raised when the frequency is too close to the Dirichlet spectrum of the
// interior block; `margin` is min |pivot| / ||A_ii||_inf.
struct FrequencyTooClose : Error {
  FrequencyTooClose(const std::string& what, double m)
      : Error("alpha_precondition", what), margin(m) {}
  double margin;
};

}  // namespace stekiso

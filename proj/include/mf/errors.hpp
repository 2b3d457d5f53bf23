#pragma once

#include <stdexcept>
#include <string>

namespace mf {

/// Base class for all library errors. `kind()` is a stable machine-readable tag
/// that the CLI echoes into its error record.
class Error : public std::runtime_error
{
  public:
    Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind))
    {
    }
    const std::string& kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

/// Request exceeds a configured size cap (mode count, dense-solve dimension).
struct ResourceError : Error
{
    explicit ResourceError(const std::string& w) : Error("resource", w) {}
};

/// A spectral truncation band does not cover what the operation needs.
struct TruncationError : Error
{
    explicit TruncationError(const std::string& w) : Error("truncation", w) {}
};

/// Quadrature is not exact for the requested band products.
struct QuadratureError : Error
{
    explicit QuadratureError(const std::string& w) : Error("quadrature", w) {}
};

/// A constructed object failed its own validation (lattice properties, weights, ...).
struct ValidationError : Error
{
    explicit ValidationError(const std::string& w) : Error("validation", w) {}
};

/// Iterative solver did not reach its tolerance.
struct ConvergenceError : Error
{
    ConvergenceError(const std::string& w, double residual)
      : Error("convergence", w), residual_(residual)
    {
    }
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/// Linear system is singular or the sampling set cannot determine the function.
struct RankError : Error
{
    explicit RankError(const std::string& w) : Error("rank", w) {}
};

/// Operation is not defined for this manifold kind.
struct UnsupportedError : Error
{
    explicit UnsupportedError(const std::string& w) : Error("unsupported", w) {}
};

/// Calibration search found no admissible constant in its bracket.
struct CalibrationError : Error
{
    explicit CalibrationError(const std::string& w, std::string trace = {})
      : Error("calibration", w), trace_(std::move(trace))
    {
    }
    /// CSV text of the sweep that failed (empty when there was no sweep).
    const std::string& trace() const noexcept { return trace_; }

  private:
    std::string trace_;
};

/// Invalid user-supplied argument.
struct ArgumentError : Error
{
    explicit ArgumentError(const std::string& w) : Error("argument", w) {}
};

} // namespace mf

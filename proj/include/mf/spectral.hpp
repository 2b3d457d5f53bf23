#pragma once

// Closed-form Laplace-Beltrami eigenbases of the built-in manifolds, functions
// represented by their coefficients over such a basis, and spectral multipliers.

#include "mf/manifold.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mf {

/// One eigenfunction. The meaning of (a, b) depends on the manifold:
///   Circle            a = frequency k, b = 0 constant / 1 cos / 2 sin
///   Torus2            a, b = circle-mode index on each axis (see circle_mode_index)
///   Sphere2           a = degree l, b = order in -l..l (negative: sin, positive: cos)
///   IntervalDirichlet a = frequency k >= 1
struct Mode
{
    double lambda;
    int a;
    int b;
};

/// Canonical circle-mode index: 0 constant, 2k-1 cos(k.), 2k sin(k.).
constexpr int circle_mode_index(int k, bool sine) { return k == 0 ? 0 : 2 * k - (sine ? 0 : 1); }
constexpr int circle_mode_frequency(int index) { return (index + 1) / 2; }

inline constexpr std::size_t default_mode_cap = 250000;
inline constexpr int sphere_degree_cap = 200;

/// All eigenfunctions of L with eigenvalue <= band, in canonical order:
/// nondecreasing eigenvalue, ties broken by
///   Circle: constant, cos, sin;  Torus2: (axis-1 index, axis-2 index) lexicographic;
///   Sphere2: order -l..l;  IntervalDirichlet: none (simple spectrum).
/// The basis for a smaller band is always a prefix of the basis for a larger one.
class SpectralBasis
{
  public:
    SpectralBasis(const ManifoldSpec& manifold, double band, std::size_t mode_cap = default_mode_cap);

    const ManifoldSpec& manifold() const { return manifold_; }
    double band() const { return band_; }
    std::size_t size() const { return modes_.size(); }
    const Mode& mode(std::size_t m) const { return modes_[m]; }
    double eigenvalue(std::size_t m) const { return modes_[m].lambda; }
    std::string describe(std::size_t m) const;

    /// Number of leading modes with eigenvalue <= b.
    std::size_t count_upto(double b) const;
    /// Number of zero modes (1 on closed manifolds, 0 on the Dirichlet interval).
    std::size_t zero_mode_count() const;
    /// Largest per-axis frequency (Circle/Torus2/Interval) or degree (Sphere2) present.
    int max_frequency() const { return max_freq_; }

    double eval(std::size_t m, const Point& x) const;
    /// Values of every mode at x, in canonical order. out.size() must equal size().
    void eval_all(const Point& x, std::span<double> out) const;

  private:
    ManifoldSpec manifold_;
    double band_;
    int max_freq_ = 0;
    std::vector<Mode> modes_;
    std::vector<double> rec_a_, rec_b_; // normalized Legendre recurrence coefficients (Sphere2)
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

BasisPtr enumerate_basis(const ManifoldSpec& manifold, double band,
                         std::size_t mode_cap = default_mode_cap);

/// Smallest positive eigenvalue of L on the manifold.
double first_positive_eigenvalue(const ManifoldSpec& manifold);

/// Largest per-axis frequency / degree whose eigenvalue fits under `band`.
int band_frequency(Kind kind, double band);

double eval_mode(const SpectralBasis& basis, std::size_t m, const Point& x);

/// A function in E_band(L), stored as coefficients c_m = <f, u_m>.
class SpectralFunction
{
  public:
    explicit SpectralFunction(BasisPtr basis);
    SpectralFunction(BasisPtr basis, Eigen::VectorXd coefficients);

    const SpectralBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::VectorXd& coefficients() const { return c_; }
    double coefficient(std::size_t m) const { return c_[static_cast<Eigen::Index>(m)]; }

    double norm() const { return c_.norm(); }
    double squared_norm() const { return c_.squaredNorm(); }
    /// Largest eigenvalue carrying a nonzero coefficient (0 for the zero function).
    double band() const;
    /// (I - P) f: the component orthogonal to the kernel of L.
    SpectralFunction without_kernel() const;

    double operator()(const Point& x) const;

    SpectralFunction operator+(const SpectralFunction& o) const;
    SpectralFunction operator-(const SpectralFunction& o) const;
    SpectralFunction operator*(double s) const;

  private:
    BasisPtr basis_;
    Eigen::VectorXd c_;
};

inline SpectralFunction operator*(double s, const SpectralFunction& f) { return f * s; }

double inner(const SpectralFunction& f, const SpectralFunction& g);

/// Re-express f over another basis of the same manifold. Fails rather than
/// dropping nonzero coefficients that the target cannot hold.
SpectralFunction rebase(const SpectralFunction& f, BasisPtr target);

double synthesize(const SpectralFunction& f, const Point& x);

/// A scalar function F on [0, inf) used as F(tL). `support_max` is an upper
/// bound of supp F; infinity when F is not compactly supported.
struct SpectralMultiplier
{
    std::function<double(double)> fn;
    double support_max = std::numeric_limits<double>::infinity();

    double operator()(double s) const { return fn(s); }
};

SpectralMultiplier multiplier_constant(double value);
/// Indicator of [0, upper].
SpectralMultiplier multiplier_indicator(double upper);
/// Pointwise product F*G (support is the smaller of the two).
SpectralMultiplier multiplier_product(const SpectralMultiplier& f, const SpectralMultiplier& g);

/// F(tL) f, i.e. c_m -> F(t lambda_m) c_m.
SpectralFunction apply_multiplier(const SpectralMultiplier& F, double t, const SpectralFunction& f);

/// Truncated kernel sum_m F(t lambda_m) u_m(x) u_m(y). Bitwise symmetric in (x, y).
/// Throws TruncationError when supp F(t.) reaches beyond the basis band.
double kernel_eval(const SpectralMultiplier& F, double t, const Point& x, const Point& y,
                   const SpectralBasis& basis);

} // namespace mf

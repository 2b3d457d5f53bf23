#pragma once

#include "mf/manifold.hpp"
#include "mf/spectral.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace mf {

struct GaussLegendre
{
    std::vector<double> nodes;   // ascending, in (-1, 1)
    std::vector<double> weights; // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n - 1.
GaussLegendre gauss_legendre(int n);

/// A positive quadrature rule on a manifold that is exact for products f*g with
/// f in E_b1 and g in E_b2 whenever `exact_for(b1, b2)` holds.
///
/// Rules per manifold:
///   Circle, Torus2      uniform grid, N points per axis, exact for frequencies < N
///   Sphere2             Gauss-Legendre in cos(colatitude) x uniform longitude
///   IntervalDirichlet   midpoint rule, N nodes, exact for cos(n x), 0 <= n < 2N
struct QuadratureRule
{
    Kind kind = Kind::Circle;
    std::vector<Point> points;
    std::vector<double> weights;
    /// Largest total per-axis frequency (degree on the sphere) integrated exactly.
    int capacity = 0;

    std::size_t size() const { return points.size(); }
    bool exact_for(double band1, double band2) const;
};

/// Smallest rule exact for products of E_band1 and E_band2.
QuadratureRule exact_rule(const ManifoldSpec& manifold, double band1, double band2);

/// Exact rule for E_band1 x E_band2 whose node spacing is additionally at most `spacing`.
QuadratureRule fine_rule(const ManifoldSpec& manifold, double spacing, double band1 = 0.0,
                         double band2 = 0.0);

/// Coefficients <f, u_m> over `basis`, computed with `rule`. `f_band` declares
/// f in E_f_band; the rule must be exact for E_f_band x E_basis.band or a
/// QuadratureError is raised.
SpectralFunction analyze(BasisPtr basis, const std::function<double(const Point&)>& f,
                         double f_band, const QuadratureRule& rule);

/// Integrals of the basis functions over the manifold (sqrt(Vol) for the
/// constant mode, 0 for the rest on closed manifolds; nonzero odd sine modes
/// on the Dirichlet interval).
Eigen::VectorXd mode_integrals(const SpectralBasis& basis);

/// Gram matrix <u_i, u_j> of the basis computed by an exact rule.
Eigen::MatrixXd gram_matrix(const SpectralBasis& basis);

} // namespace mf

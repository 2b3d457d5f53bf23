#pragma once

#include "mf/lattice.hpp"
#include "mf/linalg.hpp"
#include "mf/spectral.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace mf {

/// Matrix of point evaluations U(k, m) = u_m(x_k) over the whole basis.
Eigen::MatrixXd sample_matrix(const SpectralBasis& basis, const std::vector<Point>& points);

struct FrameBounds
{
    double A = 0.0; // lambda_min of the sampling frame operator
    double B = 0.0; // lambda_max
    std::size_t dim = 0;
    std::size_t card = 0;

    double ratio() const { return B > 0.0 ? A / B : 0.0; }
};

struct SamplingOptions
{
    double eps_norm = 1e-6;          // weights are scaled so that B = 1 - eps_norm
    std::size_t dense_cap = 4096;    // largest dim E_omega handled by the dense eigensolve
    Eigen::Index jacobi_max_dim = default_jacobi_max_dim;
};

/// Points of a lattice with positive weights, for sampling E_omega.
struct SamplingSet
{
    Lattice lattice;
    double omega = 0.0;
    BasisPtr basis;                // E_omega
    std::vector<double> weights;   // mu_k
    std::vector<double> masses;    // Voronoi masses before the global rescale
    double scale = 1.0;            // weights = scale * masses
    double weight_constant = 0.0;  // c with mu_k in [c rho^d / 4, 4 c rho^d] when the spread allows
    Eigen::MatrixXd U;             // sample_matrix(*basis, lattice.points)
    std::optional<FrameBounds> bounds;

    std::size_t size() const { return weights.size(); }
};

/// Voronoi masses of the lattice points: exact half-gap cells in 1-D, nearest
/// centre assignment of a fine exact rule (spacing <= rho/8) in 2-D.
std::vector<double> voronoi_masses(const Lattice& lattice);

/// Voronoi-mass weights rescaled so that lambda_max(S) = 1 - eps_norm.
SamplingSet default_weights(const Lattice& lattice, double omega, const SamplingOptions& opt = {});

/// Sampling set with caller-supplied weights (no rescale).
SamplingSet make_sampling_set(const Lattice& lattice, double omega, std::vector<double> weights);

/// Extreme eigenvalues of S = U^T W U on E_omega.
FrameBounds frame_bounds(const SamplingSet& ss, const SamplingOptions& opt = {});

/// theta = projection of sqrt(mu) delta_x onto E_omega, over `basis` (which must hold E_omega).
SpectralFunction delta_projection(BasisPtr basis, const Point& x, double omega, double mu);

struct C0TraceRow
{
    double c;
    double omega;
    std::uint64_t seed;
    std::size_t card;
    double A;
    double B;
};

struct C0Calibration
{
    double c0 = 0.0;     // safety * edge
    double edge = 0.0;   // largest admissible c found by the search
    std::vector<C0TraceRow> trace;
};

struct C0Options
{
    double c_hi = 8.0;
    double c_lo = 0.05;
    double scan_factor = 1.25;
    int bisection_steps = 8;
    int seeds = 3;
    /// Back-off applied to the admissible edge, so that lattices drawn with
    /// other seeds at the returned constant keep the bound.
    double safety = 0.9;
    SamplingOptions sampling;
};

/// Largest c (within the search bracket) such that lattices with rho = c omega^{-1/2}
/// give A/B >= 1 - delta for every omega and every calibration seed.
C0Calibration calibrate_c0(const ManifoldSpec& manifold, double delta, const std::vector<double>& omegas,
                           std::uint64_t seed, const C0Options& opt = {});

struct Reconstruction
{
    SpectralFunction f;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves S c = U^T W y by conjugate gradients (the canonical dual frame).
Reconstruction reconstruct_from_samples(const SamplingSet& ss, const std::vector<double>& samples,
                                        double tol = 1e-10);

} // namespace mf

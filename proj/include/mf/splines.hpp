#pragma once

#include "mf/lattice.hpp"
#include "mf/spectral.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mf {

/// Interpolating spline of order k on a lattice over the truncated basis E_band:
/// minimise sum_m (lambda_m / lambda_ref)^(2k) c_m^2 subject to sum_m c_m u_m(x_g) = z_g.
///
/// With b_m = (lambda_m / lambda_ref)^k c_m on the nonzero modes this is the
/// minimum-norm solution of a column-graded system. Zero modes only enter the
/// constraints and are eliminated by an orthogonal projection first.
struct SplineSystem
{
    Lattice lattice;
    int k = 1;
    BasisPtr basis;              // E_band
    double lambda_ref = 1.0;     // median nonzero eigenvalue of the basis
    std::size_t kernel_modes = 0;
    Eigen::MatrixXd E;           // nodes x modes, E(g, m) = u_m(x_g)
    Eigen::VectorXd scale;       // (lambda_ref / lambda_m)^k on the nonzero modes
    Eigen::HouseholderQR<Eigen::MatrixXd> kernel_qr;     // of the zero-mode columns
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> graded_qr; // of (Q2^T E_+ S)^T

    std::size_t nodes() const { return lattice.size(); }
};

/// Smallest band whose basis has at least dim_factor * card modes, and at least min_band.
double spline_band(const ManifoldSpec& manifold, std::size_t card, double min_band, double dim_factor = 4.0);

/// Throws RankError listing dependent nodes when the interpolation matrix lacks full row rank.
SplineSystem build_spline_system(const Lattice& lattice, int k, double band);

struct SplineSolution
{
    SpectralFunction s;
    double objective = 0.0;      // sum (lambda/lambda_ref)^(2k) c^2, from the primal solution
    double dual_objective = 0.0; // y^T eta from the multipliers of the reduced system
    double residual = 0.0;       // max_g |s(x_g) - z_g|
};

SplineSolution interpolate_solution(const SplineSystem& sys, const Eigen::VectorXd& z);
SpectralFunction interpolate(const SplineSystem& sys, const Eigen::VectorXd& z);
/// Spline coefficients for several right-hand sides (nodes x batch -> modes x batch).
Eigen::MatrixXd interpolate_many(const SplineSystem& sys, const Eigen::MatrixXd& Z);

/// Value 1 at node gamma and 0 at every other node.
SpectralFunction lagrangian_spline(const SplineSystem& sys, std::size_t gamma);

/// sum_m (lambda_m / lambda_ref)^(2k) c_m^2 for a function over sys.basis.
double spline_objective(const SplineSystem& sys, const SpectralFunction& g);

/// Spline order schedule k = 2^l d, l = 0..l_max.
std::vector<int> spline_orders(const ManifoldSpec& manifold, int l_max);

struct SplineRow
{
    int k;
    double sup_error;
    double l2_error;
    double residual; // interpolation residual at the nodes
};

struct SplineTable
{
    double rho = 0.0;
    double omega = 0.0;
    double band = 0.0;       // Lambda_s
    std::size_t nodes = 0;
    std::size_t probes = 0;
    std::vector<SplineRow> rows;
    double fitted_rate = 0.0;   // q in sup_error ~ C q^k (log-linear least squares over rows above the floor)
    /// Roundoff floor of the sup error: 256 eps max|z|. Errors at or below it are
    /// indistinguishable from each other.
    double floor = 0.0;
    bool monotone = true;       // sup errors nonincreasing along the schedule, up to the floor
    std::optional<int> diverged_at; // first k whose error exceeds its predecessor

    double rho_sqrt_omega() const;
};

struct SplineOptions
{
    double band = 0.0;          // Lambda_s; 0 picks spline_band(card, band_factor * omega)
    double band_factor = 16.0;
    double dim_factor = 4.0;
    double probe_factor = 0.1;  // probe spacing = probe_factor * rho
};

/// s_k(f) for every k in `orders`, with sup-norm error on a probe grid and L2 error.
SplineTable spline_reconstruct(const SpectralFunction& f, const Lattice& lattice, const std::vector<int>& orders,
                               const SplineOptions& opt = {});

} // namespace mf

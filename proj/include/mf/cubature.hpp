#pragma once

#include "mf/filterbank.hpp"
#include "mf/lattice.hpp"
#include "mf/spectral.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

namespace mf {

/// Evaluation of a basis at a fixed node set, as a linear map between
/// coefficient vectors and node values. Torus2 uses separable per-axis tables;
/// otherwise the node x mode matrix is stored when it fits under `dense_limit`
/// entries and recomputed in node chunks when it does not.
class SampleOperator
{
  public:
    SampleOperator(BasisPtr basis, std::vector<Point> nodes, std::size_t dense_limit = 60'000'000);

    const SpectralBasis& basis() const { return *basis_; }
    std::size_t nodes() const { return nodes_.size(); }
    std::size_t modes() const { return basis_->size(); }

    /// values(k, i) = sum_m coef(m, i) u_m(x_k)
    Eigen::MatrixXd apply(const Eigen::MatrixXd& coef) const;
    /// coef(m, i) = sum_k values(k, i) u_m(x_k)
    Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& values) const;

    /// Node x mode matrix when stored (empty otherwise).
    const Eigen::MatrixXd& dense() const { return U_; }

  private:
    enum class Mode
    {
        Dense,
        Separable,
        Chunked
    };
    Eigen::MatrixXd chunk(std::size_t begin, std::size_t end) const;

    BasisPtr basis_;
    std::vector<Point> nodes_;
    Mode mode_;
    Eigen::MatrixXd U_;
    Eigen::MatrixXd C1_, C2_;           // per-axis circle tables (Torus2)
    std::vector<int> ax1_, ax2_;        // per-mode axis indices (Torus2)
    int axis_modes_ = 0;
};

struct ProductReport
{
    double omega = 0.0;          // f, g in E_omega
    double limit = 0.0;          // 4 m omega
    double analysis_band = 0.0;  // 8 m omega
    double total_energy = 0.0;   // ||fg||^2 over E_analysis_band
    double outside_energy = 0.0; // part above the limit
    double fraction() const { return total_energy > 0.0 ? outside_energy / total_energy : 0.0; }
};

/// Computes fg by exact quadrature with head-room and analyses it up to 8 m omega.
/// Reusable across many pairs on the same manifold and omega.
class ProductAnalyzer
{
  public:
    ProductAnalyzer(const ManifoldSpec& manifold, double omega);
    ProductReport check(const SpectralFunction& f, const SpectralFunction& g) const;

  private:
    ManifoldSpec manifold_;
    double omega_;
    double limit_;
    BasisPtr wide_;
    std::vector<double> weights_;
    std::shared_ptr<const SampleOperator> sampler_; // rule nodes over the wide basis
};

ProductReport product_band_check(const SpectralFunction& f, const SpectralFunction& g, double omega);

struct CubatureOptions
{
    double cg_tol = 1e-13;           // relative residual for the matrix-free moment solve
    std::size_t dense_solve_max = 2000; // direct factorisation up to this many moments
    std::size_t dense_limit = 60'000'000;
};

/// Positive weights integrating E_omega exactly on a lattice.
struct CubatureRule
{
    Lattice lattice;
    double omega = 0.0;
    std::vector<double> weights;    // alpha_k
    std::vector<double> voronoi;    // starting weights mu_k
    std::size_t moments = 0;        // dim E_omega
    double max_moment_error = 0.0;  // max_m |sum alpha_k u_m(x_k) - int u_m|
    double c1 = 0.0;                // min alpha / rho^d
    double c2 = 0.0;                // max alpha / rho^d
    int iterations = 0;             // CG iterations (0 for the direct solve)

    double spread() const { return c1 > 0.0 ? c2 / c1 : 0.0; }
};

/// Least-change weights: alpha = argmin sum (alpha_k - mu_k)^2 / mu_k subject to
/// sum alpha_k u_m(x_k) = int u_m for every lambda_m <= omega, from Voronoi masses mu.
/// Throws ValidationError("density insufficient ...") if some alpha_k <= 0 and
/// RankError if the moment system is singular.
CubatureRule build_cubature(const Lattice& lattice, double omega, const CubatureOptions& opt = {});

/// Per-mode errors sum_k alpha_k u_m(x_k) - int u_m over E_omega.
Eigen::VectorXd cubature_moment_errors(const CubatureRule& rule);

struct A0Options
{
    double a_hi = 6.0;
    double a_lo = 0.2;
    double scan_factor = 1.25;
    int bisection_steps = 6;
    int seeds = 0;                // lattices per omega, all admissible; 0: 10 in 1-D, 3 otherwise
    double max_spread = 10.0;     // admissible c2 / c1
    double moment_tol = 1e-10;
    double safety = 0.9;
    CubatureOptions cubature;
};

struct A0TraceRow
{
    double a;
    double omega;
    std::uint64_t seed;
    std::size_t card;
    bool positive;
    double spread;
    double moment_error;
};

struct A0Calibration
{
    double a0 = 0.0;
    double edge = 0.0;
    std::vector<A0TraceRow> trace;
};

/// Largest a with positive weights, spread <= max_spread and exact moments for
/// lattices at rho = a (omega + 1)^{-1/2}, over all omegas; returns safety * edge.
A0Calibration calibrate_a0(const ManifoldSpec& manifold, const std::vector<double>& omegas, std::uint64_t seed,
                           const A0Options& opt = {});

struct ParsevalOptions
{
    double band = 930.0;  // spectral truncation Lambda
    int j_min = -1;
    int j_max = 5;
    double a0 = 0.0;
    /// Cubature band = product_factor * omega_j. 4 is sharp for the catalog
    /// (degrees and frequencies add); 4m is the general bound.
    double product_factor = 4.0;
    int max_retries = 3;  // rho halved on each cubature failure
    CubatureOptions cubature;
};

struct ParsevalScale
{
    int j;
    double omega;          // min(4^(j+2), band)
    double cubature_band;  // product_factor * omega
    std::size_t rule;      // index into ParsevalFrame::rules
    std::size_t first_atom;
};

/// Tight frame Psi_jk = sqrt(b_jk) Phi(4^-j L) delta_{x_jk} on E_band. Scales with the
/// same truncated band share one lattice and cubature rule.
struct ParsevalFrame
{
    ManifoldSpec manifold;
    FilterBank filter;
    BasisPtr basis;
    ParsevalOptions options;
    std::vector<ParsevalScale> scales;
    std::vector<std::shared_ptr<const CubatureRule>> rules;
    std::vector<int> retries; // per rule
    std::vector<std::shared_ptr<const SampleOperator>> samplers; // per rule, over basis prefix E_omega

    std::size_t atom_count() const;
    /// Psi_jk as a spectral function.
    SpectralFunction atom(std::size_t i) const;
    int atom_scale(std::size_t i) const;
};

ParsevalFrame build_parseval_frame(const ManifoldSpec& manifold, const FilterBank& fb, const ParsevalOptions& opt,
                                   std::uint64_t seed);

/// <f_i, Psi_jk> for a batch of functions given as coefficient columns over pf.basis.
/// Result is atoms x batch, atoms in (j, k) order.
Eigen::MatrixXd parseval_analysis(const Eigen::MatrixXd& coef, const ParsevalFrame& pf);
Eigen::VectorXd parseval_analysis(const SpectralFunction& f, const ParsevalFrame& pf);

struct ParsevalEnergy
{
    double frame_energy = 0.0;  // sum |<f, Psi>|^2
    double norm_energy = 0.0;   // ||(I - P) f||^2
    double relative_gap() const
    {
        return norm_energy > 0.0 ? std::abs(frame_energy - norm_energy) / norm_energy : std::abs(frame_energy);
    }
};

ParsevalEnergy parseval_check(const SpectralFunction& f, const ParsevalFrame& pf);

/// sum_jk a_jk Psi_jk for coefficient columns (atoms x batch); no linear solve.
Eigen::MatrixXd parseval_synthesis(const Eigen::MatrixXd& coefficients, const ParsevalFrame& pf);
SpectralFunction parseval_reconstruct(const Eigen::VectorXd& coefficients, const ParsevalFrame& pf);

} // namespace mf

#pragma once

#include "mf/lattice.hpp"
#include "mf/sampling.hpp"
#include "mf/spectral.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace mf {

/// Dyadic filter bank built from a smooth cutoff psi:
///   psi = 1 on [0, 1/4], 0 on [4, inf), nonincreasing,
///   Phi(s)^2 = psi(s/4) - psi(s), supported in (1/4, 16),
///   sum_j Phi(4^-j s)^2 = 1 for s > 0.
struct FilterBank
{
    double psi(double s) const;
    double phi_sq(double s) const;
    double phi(double s) const;
    /// Phi(4^-j s)^2 and Phi(4^-j s).
    double phi_sq_at(int j, double s) const;
    double phi_at(int j, double s) const;
    /// s -> Phi(4^-j s) as a spectral multiplier (t = 1), support below 4^(j+2).
    SpectralMultiplier multiplier(int j) const;

    /// Scales needed to resolve every eigenvalue in [lambda1, band]: j_min is the
    /// largest j with 4^(j+1) <= lambda1, j_max the smallest j with 4^j >= band.
    struct Range
    {
        int j_min;
        int j_max;
    };
    Range scales_for(double lambda1, double band) const;
};

FilterBank make_filter();

/// 4^j as an exact double.
double pow4(int j);

/// Smallest and largest eigenvalue the scale-j filter can touch: (4^(j-1), 4^(j+2)).
double scale_band_lo(int j);
double scale_band_hi(int j);

struct BandComponent
{
    int j;
    SpectralFunction g; // Phi(4^-j L) f
};

/// g_j = Phi(4^-j L) f for every scale meeting the spectrum of f's basis.
std::vector<BandComponent> band_decompose(const SpectralFunction& f, const FilterBank& fb);

/// Theta = Phi(4^-j L) (sqrt(mu) delta_x projected onto E_omega), over `basis`.
SpectralFunction make_atom(BasisPtr basis, const FilterBank& fb, int j, const Point& x, double mu, double omega);

/// Scales whose filter touches an occupied eigenvalue of f but are not in `have`.
std::vector<int> missing_scales(const SpectralFunction& f, const FilterBank& fb, const std::vector<int>& have);

struct FrameAtom
{
    int j;
    std::size_t k;
    Point center;
    double mu;
    double band_lo; // 4^(j-1)
    double band_hi; // 4^(j+2)
    SpectralFunction rep;
};

struct FrameScale
{
    int j;
    double omega;       // min(4^(j+2), band): the space the scale samples
    double rho;         // lattice spacing actually used
    int refinements;    // times rho was shrunk to reach A/B >= 1 - delta
    Lattice lattice;
    std::vector<double> weights;
    FrameBounds bounds; // sampling bounds on E_omega
    std::size_t first_atom;
};

struct FrameOptions
{
    double band = 256.0;   // spectral truncation of the frame
    int j_min = -1;
    int j_max = 4;
    double delta = 0.5;
    double c0 = 0.0;       // from calibrate_c0
    double refine_factor = 0.85;
    int max_refinements = 8;
    SamplingOptions sampling;
};

/// Nearly tight frame {Theta_jk}: per scale a lattice with rho_j = c0 omega_j^{-1/2},
/// omega_j = min(4^(j+2), band), Voronoi weights normalised on E_omega_j, and atoms
/// Phi(4^-j L) theta_jk. Atoms are stored as rows of T over the basis E_band.
struct Frame
{
    ManifoldSpec manifold;
    FilterBank filter;
    BasisPtr basis;
    FrameOptions options;
    std::vector<FrameScale> scales;
    Eigen::MatrixXd T; // atoms x dim

    std::size_t atom_count() const { return static_cast<std::size_t>(T.rows()); }
    FrameAtom atom(std::size_t i) const;
    /// Lower and upper sampling bounds over all scales.
    double lower_bound() const;
    double upper_bound() const;
};

Frame build_frame(const ManifoldSpec& manifold, const FilterBank& fb, const FrameOptions& opt, std::uint64_t seed);

/// <f, Theta_jk> for all atoms, in (j, k) order. Throws TruncationError listing the
/// missing scales when f reaches beyond what the frame resolves.
Eigen::VectorXd frame_analysis(const SpectralFunction& f, const Frame& frame);

struct FrameReconstruction
{
    SpectralFunction f;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Canonical dual reconstruction: solves (T^T T) c = T^T a by conjugate gradients.
FrameReconstruction frame_reconstruct(const Eigen::VectorXd& coefficients, const Frame& frame, double tol = 1e-10);

struct DecayReport
{
    std::vector<double> scaled_distance; // 2^j dist(x, center)
    std::vector<double> scaled_value;    // |Theta(x)| 2^{-d j}
    double exponent = 0.0;               // fitted N
    double constant = 0.0;               // C(N): max of scaled_value * scaled_distance^N over the fit region
    std::size_t fit_points = 0;
};

struct DecayOptions
{
    double fit_lo = 2.0;
    double fit_hi = 32.0;
    /// Envelope values below this fraction of the peak are roundoff and left out of the fit.
    double floor = 1e-13;
};

/// Measures |Theta(x)| against 2^j dist(x, center) and fits the decay exponent of
/// the tail envelope sup_{s >= r} |Theta| by log-log least squares over [fit_lo, fit_hi].
DecayReport localization_profile(const SpectralFunction& atom, int j, const Point& center,
                                 const std::vector<Point>& probes, const DecayOptions& opt = {});

/// Probe points along geodesics leaving `center`, at distances 0..max_dist.
std::vector<Point> radial_probes(const ManifoldSpec& manifold, const Point& center, double max_dist,
                                 std::size_t count);

} // namespace mf

#include "mf/filterbank.hpp"

#include "mf/errors.hpp"
#include "mf/format.hpp"
#include "mf/linalg.hpp"
#include "mf/parallel.hpp"
#include "mf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mf {

namespace {

double h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double sigma(double t)
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    const double a = h(t), b = h(1.0 - t);
    return a / (a + b);
}

} // namespace

double pow4(int j) { return std::ldexp(1.0, 2 * j); }
double scale_band_lo(int j) { return pow4(j - 1); }
double scale_band_hi(int j) { return pow4(j + 2); }

double FilterBank::psi(double s) const { return 1.0 - sigma((s - 0.25) / 3.75); }

double FilterBank::phi_sq(double s) const { return std::max(0.0, psi(0.25 * s) - psi(s)); }

double FilterBank::phi(double s) const { return std::sqrt(phi_sq(s)); }

double FilterBank::phi_sq_at(int j, double s) const { return phi_sq(s * pow4(-j)); }

double FilterBank::phi_at(int j, double s) const { return phi(s * pow4(-j)); }

SpectralMultiplier FilterBank::multiplier(int j) const
{
    FilterBank fb = *this;
    return {[fb, j](double s) { return fb.phi_at(j, s); }, scale_band_hi(j)};
}

FilterBank::Range FilterBank::scales_for(double lambda1, double band) const
{
    if (!(lambda1 > 0.0))
        throw ArgumentError("lambda1 must be positive");
    int lo = 0;
    while (pow4(lo + 1) > lambda1)
        --lo;
    while (pow4(lo + 2) <= lambda1)
        ++lo;
    int hi = lo;
    while (pow4(hi) < band)
        ++hi;
    return {lo, hi};
}

FilterBank make_filter() { return FilterBank{}; }

std::vector<BandComponent> band_decompose(const SpectralFunction& f, const FilterBank& fb)
{
    const SpectralBasis& b = f.basis();
    std::vector<BandComponent> out;
    const std::size_t z = b.zero_mode_count();
    if (b.size() == z)
        return out;
    const auto range = fb.scales_for(b.eigenvalue(z), b.band());
    for (int j = range.j_min; j <= range.j_max; ++j)
        out.push_back({j, apply_multiplier(fb.multiplier(j), 1.0, f)});
    return out;
}

SpectralFunction make_atom(BasisPtr basis, const FilterBank& fb, int j, const Point& x, double mu, double omega)
{
    SpectralFunction theta = delta_projection(std::move(basis), x, omega, mu);
    return apply_multiplier(fb.multiplier(j), 1.0, theta);
}

std::vector<int> missing_scales(const SpectralFunction& f, const FilterBank& fb, const std::vector<int>& have)
{
    std::vector<int> out;
    const double band = f.band();
    if (band == 0.0)
        return out;
    const auto& b = f.basis();
    const auto need = fb.scales_for(first_positive_eigenvalue(b.manifold()), band);
    for (int j = need.j_min; j <= need.j_max; ++j) {
        if (std::find(have.begin(), have.end(), j) != have.end())
            continue;
        bool used = false;
        for (std::size_t m = 0; m < b.size() && !used; ++m)
            used = f.coefficient(m) != 0.0 && fb.phi_sq_at(j, b.eigenvalue(m)) > 0.0;
        if (used)
            out.push_back(j);
    }
    return out;
}

FrameAtom Frame::atom(std::size_t i) const
{
    const auto it = std::upper_bound(scales.begin(), scales.end(), i,
                                     [](std::size_t v, const FrameScale& s) { return v < s.first_atom; });
    const FrameScale& s = *(it - 1);
    const std::size_t k = i - s.first_atom;
    Eigen::VectorXd c = T.row(static_cast<Eigen::Index>(i)).transpose();
    return {s.j, k, s.lattice.points[k], s.weights[k], scale_band_lo(s.j), scale_band_hi(s.j),
            SpectralFunction(basis, std::move(c))};
}

double Frame::lower_bound() const
{
    double a = 1.0;
    for (const auto& s : scales)
        a = std::min(a, s.bounds.A);
    return a;
}

double Frame::upper_bound() const
{
    double b = 0.0;
    for (const auto& s : scales)
        b = std::max(b, s.bounds.B);
    return b;
}

Frame build_frame(const ManifoldSpec& manifold, const FilterBank& fb, const FrameOptions& opt, std::uint64_t seed)
{
    if (!(opt.delta > 0.0 && opt.delta < 1.0))
        throw ArgumentError("delta must lie in (0, 1)");
    if (!(opt.c0 > 0.0))
        throw CalibrationError("frame construction needs a calibrated c0 > 0");
    if (opt.j_min > opt.j_max)
        throw ArgumentError("empty scale range");

    Frame fr{manifold, fb, enumerate_basis(manifold, opt.band), opt, {}, {}};
    const auto dim = static_cast<Eigen::Index>(fr.basis->size());
    std::vector<Eigen::MatrixXd> blocks;
    std::size_t atoms = 0;

    for (int j = opt.j_min; j <= opt.j_max; ++j) {
        FrameScale sc{j, std::min(scale_band_hi(j), opt.band), 0.0, 0, {}, {}, {}, atoms};
        sc.rho = opt.c0 / std::sqrt(sc.omega);
        const std::uint64_t s = derive_seed(seed, "frame-scale", static_cast<std::uint64_t>(j + 1000));
        SamplingSet ss;
        for (;;) {
            sc.lattice = generate_lattice(manifold, sc.rho, s);
            ss = default_weights(sc.lattice, sc.omega, opt.sampling);
            if (ss.bounds->ratio() >= 1.0 - opt.delta)
                break;
            if (sc.refinements == opt.max_refinements)
                throw ValidationError("frame scale j = " + std::to_string(j) + ": A/B = " + fmt(ss.bounds->ratio()) +
                                      " after " + std::to_string(sc.refinements) + " refinements");
            sc.rho *= opt.refine_factor;
            ++sc.refinements;
        }
        sc.weights = ss.weights;
        sc.bounds = *ss.bounds;

        // Theta_jk coefficients: Phi(4^-j lambda_m) sqrt(mu_k) u_m(x_k), lambda_m <= omega_j
        const auto card = static_cast<Eigen::Index>(sc.lattice.size());
        const Eigen::Index nm = ss.U.cols();
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(card, dim);
        for (Eigen::Index m = 0; m < nm; ++m) {
            const double p = fb.phi_at(j, fr.basis->eigenvalue(static_cast<std::size_t>(m)));
            if (p == 0.0)
                continue;
            for (Eigen::Index k = 0; k < card; ++k)
                block(k, m) = p * std::sqrt(sc.weights[static_cast<std::size_t>(k)]) * ss.U(k, m);
        }
        atoms += static_cast<std::size_t>(card);
        blocks.push_back(std::move(block));
        fr.scales.push_back(std::move(sc));
    }
    fr.T.resize(static_cast<Eigen::Index>(atoms), dim);
    Eigen::Index row = 0;
    for (auto& b : blocks) {
        fr.T.middleRows(row, b.rows()) = b;
        row += b.rows();
    }
    return fr;
}

namespace {

void check_coverage(const SpectralFunction& f, const Frame& frame)
{
    const double band = f.band();
    if (band > frame.basis->band())
        throw TruncationError("function band " + fmt(band) + " exceeds the frame truncation " +
                              fmt(frame.basis->band()));
    std::vector<int> have;
    for (const auto& s : frame.scales)
        have.push_back(s.j);
    const auto miss = missing_scales(f, frame.filter, have);
    if (!miss.empty()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < miss.size(); ++i)
            os << (i ? ", " : "") << miss[i];
        throw TruncationError("frame lacks scales j = " + os.str() + " needed by the function's spectrum");
    }
}

} // namespace

Eigen::VectorXd frame_analysis(const SpectralFunction& f, const Frame& frame)
{
    check_coverage(f, frame);
    const SpectralFunction g = rebase(f, frame.basis);
    return frame.T * g.coefficients();
}

FrameReconstruction frame_reconstruct(const Eigen::VectorXd& coefficients, const Frame& frame, double tol)
{
    if (coefficients.size() != frame.T.rows())
        throw ArgumentError("one coefficient per frame atom expected");
    const Eigen::VectorXd rhs = frame.T.transpose() * coefficients;
    auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        const Eigen::VectorXd t = frame.T * x;
        y.noalias() = frame.T.transpose() * t;
    };
    CgResult cg = conjugate_gradient(op, rhs, tol, 10 * static_cast<int>(frame.basis->size()) + 10);
    if (!cg.converged) {
        const double a = frame.lower_bound();
        throw ConvergenceError("frame operator inversion did not converge: relative residual " +
                                   fmt(cg.relative_residual) + ", lower frame bound estimate " + fmt(a),
                               cg.relative_residual);
    }
    return {SpectralFunction(frame.basis, std::move(cg.x)), cg.iterations, cg.relative_residual};
}

std::vector<Point> radial_probes(const ManifoldSpec& manifold, const Point& center, double max_dist,
                                 std::size_t count)
{
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : max_dist * static_cast<double>(i) / static_cast<double>(count - 1);
        switch (manifold.kind) {
        case Kind::Circle:
            out.push_back(circle_point(center.c[0] + t));
            break;
        case Kind::Torus2:
            out.push_back(torus_point(center.c[0] + t, center.c[1]));
            break;
        case Kind::IntervalDirichlet: {
            const double x = center.c[0] + t <= std::numbers::pi ? center.c[0] + t : center.c[0] - t;
            out.push_back(interval_point(std::clamp(x, 0.0, std::numbers::pi)));
            break;
        }
        case Kind::Sphere2: {
            // great circle through center towards a fixed tangent direction
            const std::array<double, 3> x = center.c;
            std::array<double, 3> e = std::abs(x[2]) < 0.9 ? std::array<double, 3>{0, 0, 1}
                                                           : std::array<double, 3>{1, 0, 0};
            const double d = e[0] * x[0] + e[1] * x[1] + e[2] * x[2];
            for (int a = 0; a < 3; ++a)
                e[static_cast<std::size_t>(a)] -= d * x[static_cast<std::size_t>(a)];
            const double n = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
            const double c = std::cos(t), s = std::sin(t);
            out.push_back(sphere_point(c * x[0] + s * e[0] / n, c * x[1] + s * e[1] / n, c * x[2] + s * e[2] / n));
            break;
        }
        }
    }
    return out;
}

DecayReport localization_profile(const SpectralFunction& atom, int j, const Point& center,
                                 const std::vector<Point>& probes, const DecayOptions& opt)
{
    DecayReport rep;
    const int d = atom.basis().manifold().dim;
    const double sj = std::ldexp(1.0, j);
    const double scale = std::ldexp(1.0, -d * j);
    const std::size_t n = probes.size();
    rep.scaled_distance.resize(n);
    rep.scaled_value.resize(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            rep.scaled_distance[i] = sj * geodesic_distance(probes[i], center);
            rep.scaled_value[i] = std::abs(atom(probes[i])) * scale;
        }
    }, 16);

    // tail envelope sup_{r' >= r} over probes sorted by distance
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rep.scaled_distance[a] < rep.scaled_distance[b]; });
    std::vector<double> env(n);
    double run = 0.0;
    for (std::size_t r = n; r-- > 0;) {
        run = std::max(run, rep.scaled_value[order[r]]);
        env[r] = run;
    }
    const double peak = n ? *std::max_element(rep.scaled_value.begin(), rep.scaled_value.end()) : 0.0;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const double x = rep.scaled_distance[order[r]];
        if (x < opt.fit_lo || x > opt.fit_hi || env[r] <= opt.floor * peak)
            continue;
        const double lx = std::log(x), ly = std::log(env[r]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    rep.fit_points = cnt;
    if (cnt >= 2) {
        const double c = static_cast<double>(cnt);
        const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
        rep.exponent = -slope;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rep.scaled_distance[i];
            if (x >= opt.fit_lo && x <= opt.fit_hi)
                rep.constant = std::max(rep.constant, rep.scaled_value[i] * std::pow(x, rep.exponent));
        }
    }
    return rep;
}

} // namespace mf

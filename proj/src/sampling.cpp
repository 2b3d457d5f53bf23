#include "mf/sampling.hpp"

#include "mf/errors.hpp"
#include "mf/format.hpp"
#include "mf/parallel.hpp"
#include "mf/quadrature.hpp"
#include "mf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mf {

Eigen::MatrixXd sample_matrix(const SpectralBasis& basis, const std::vector<Point>& points)
{
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto dim = static_cast<Eigen::Index>(basis.size());
    // filled row by row through a row-major buffer, then stored column-major
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(n, dim);
    parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k)
            basis.eval_all(points[k], std::span<double>(rows.row(static_cast<Eigen::Index>(k)).data(),
                                                        static_cast<std::size_t>(dim)));
    }, 64);
    return rows;
}

std::vector<double> voronoi_masses(const Lattice& lattice)
{
    const auto& pts = lattice.points;
    const std::size_t n = pts.size();
    if (n == 0)
        throw ValidationError("empty lattice has no Voronoi cells");
    std::vector<double> mass(n, 0.0);
    const Kind kind = lattice.manifold.kind;

    if (kind == Kind::Circle || kind == Kind::IntervalDirichlet) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pts[a].c[0] < pts[b].c[0]; });
        if (kind == Kind::Circle) {
            constexpr double two_pi = 2.0 * std::numbers::pi;
            if (n == 1) {
                mass[0] = two_pi;
                return mass;
            }
            for (std::size_t r = 0; r < n; ++r) {
                const double prev = r == 0 ? pts[order[n - 1]].c[0] - two_pi : pts[order[r - 1]].c[0];
                const double next = r + 1 == n ? pts[order[0]].c[0] + two_pi : pts[order[r + 1]].c[0];
                mass[order[r]] = 0.5 * (next - prev);
            }
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                const double here = pts[order[r]].c[0];
                const double lo = r == 0 ? 0.0 : 0.5 * (here + pts[order[r - 1]].c[0]);
                const double hi = r + 1 == n ? std::numbers::pi : 0.5 * (here + pts[order[r + 1]].c[0]);
                mass[order[r]] = hi - lo;
            }
        }
    } else {
        const QuadratureRule rule = fine_rule(lattice.manifold, lattice.rho / 8.0);
        PointIndex idx(kind, lattice.rho / 2.0);
        for (const auto& p : pts)
            idx.insert(p);
        std::vector<std::uint32_t> owner(rule.size());
        parallel_for(rule.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t q = b; q < e; ++q)
                owner[q] = static_cast<std::uint32_t>(idx.nearest(rule.points[q]).index);
        });
        for (std::size_t q = 0; q < rule.size(); ++q)
            mass[owner[q]] += rule.weights[q];
    }
    for (std::size_t k = 0; k < n; ++k)
        if (!(mass[k] > 0.0))
            throw ValidationError("empty Voronoi cell at lattice point " + std::to_string(k) +
                                  " (lattice too nonuniform for the assignment grid)");
    return mass;
}

namespace {

Eigen::MatrixXd frame_operator(const Eigen::MatrixXd& U, const std::vector<double>& w)
{
    Eigen::MatrixXd R = U;
    for (Eigen::Index k = 0; k < R.rows(); ++k)
        R.row(k) *= std::sqrt(w[static_cast<std::size_t>(k)]);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(U.cols(), U.cols());
    S.selfadjointView<Eigen::Lower>().rankUpdate(R.transpose());
    S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
    return S;
}

FrameBounds compute_bounds(const SamplingSet& ss, const SamplingOptions& opt)
{
    FrameBounds fb;
    fb.dim = ss.basis->size();
    fb.card = ss.size();
    if (fb.dim > opt.dense_cap)
        throw ResourceError("dim E_omega = " + std::to_string(fb.dim) + " exceeds the dense eigensolve cap " +
                            std::to_string(opt.dense_cap));
    const Eigen::VectorXd ev = symmetric_eigenvalues(frame_operator(ss.U, ss.weights), opt.jacobi_max_dim);
    fb.B = ev[ev.size() - 1];
    // fewer samples than dimensions: S is singular by construction
    fb.A = fb.card < fb.dim ? 0.0 : std::max(0.0, ev[0]);
    return fb;
}

void set_weight_constant(SamplingSet& ss)
{
    const auto [lo, hi] = std::minmax_element(ss.weights.begin(), ss.weights.end());
    const double rd = std::pow(ss.lattice.rho, ss.lattice.manifold.dim);
    ss.weight_constant = std::sqrt(*lo * *hi) / rd;
}

} // namespace

SamplingSet make_sampling_set(const Lattice& lattice, double omega, std::vector<double> weights)
{
    if (weights.size() != lattice.size())
        throw ArgumentError("one weight per lattice point expected");
    for (double w : weights)
        if (!(w > 0.0))
            throw ArgumentError("sampling weights must be positive");
    SamplingSet ss;
    ss.lattice = lattice;
    ss.omega = omega;
    ss.basis = enumerate_basis(lattice.manifold, omega);
    ss.masses = weights;
    ss.weights = std::move(weights);
    ss.U = sample_matrix(*ss.basis, lattice.points);
    set_weight_constant(ss);
    return ss;
}

SamplingSet default_weights(const Lattice& lattice, double omega, const SamplingOptions& opt)
{
    SamplingSet ss = make_sampling_set(lattice, omega, voronoi_masses(lattice));
    FrameBounds raw = compute_bounds(ss, opt);
    if (!(raw.B > 0.0))
        throw ValidationError("sampling operator vanishes on E_omega");
    ss.scale = (1.0 - opt.eps_norm) / raw.B;
    for (double& w : ss.weights)
        w *= ss.scale;
    raw.A *= ss.scale;
    raw.B *= ss.scale;
    ss.bounds = raw;
    set_weight_constant(ss);
    return ss;
}

FrameBounds frame_bounds(const SamplingSet& ss, const SamplingOptions& opt)
{
    if (ss.bounds)
        return *ss.bounds;
    return compute_bounds(ss, opt);
}

SpectralFunction delta_projection(BasisPtr basis, const Point& x, double omega, double mu)
{
    if (!(mu > 0.0))
        throw ArgumentError("delta_projection needs mu > 0");
    if (omega > basis->band())
        throw TruncationError("basis band " + fmt(basis->band()) + " does not hold E_" + fmt(omega));
    const std::size_t n = basis->count_upto(omega);
    std::vector<double> u(basis->size());
    basis->eval_all(x, u);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
    const double s = std::sqrt(mu);
    for (std::size_t m = 0; m < n; ++m)
        c[static_cast<Eigen::Index>(m)] = s * u[m];
    return {std::move(basis), std::move(c)};
}

C0Calibration calibrate_c0(const ManifoldSpec& manifold, double delta, const std::vector<double>& omegas,
                           std::uint64_t seed, const C0Options& opt)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw ArgumentError("delta must lie in (0, 1)");
    if (omegas.empty())
        throw ArgumentError("calibration needs at least one omega");
    C0Calibration out;
    auto admissible = [&](double c) {
        bool ok = true;
        for (double w : omegas) {
            for (int s = 0; s < opt.seeds; ++s) {
                const std::uint64_t ls = derive_seed(seed, "calibrate-c0", static_cast<std::uint64_t>(s));
                const double rho = c / std::sqrt(w);
                const Lattice L = generate_lattice(manifold, rho, ls);
                const SamplingSet ss = default_weights(L, w, opt.sampling);
                const FrameBounds fb = *ss.bounds;
                out.trace.push_back({c, w, ls, L.size(), fb.A, fb.B});
                if (fb.ratio() < 1.0 - delta) {
                    ok = false;
                    break;
                }
            }
            if (!ok)
                break;
        }
        return ok;
    };

    double pass = 0.0, fail = 0.0;
    for (double c = opt.c_hi; c >= opt.c_lo; c /= opt.scan_factor) {
        if (admissible(c)) {
            pass = c;
            break;
        }
        fail = c;
    }
    if (pass == 0.0) {
        std::string trace = "c,omega,seed,card,A,B\n";
        for (const C0TraceRow& r : out.trace)
            trace += fmt(r.c) + "," + fmt(r.omega) + "," + std::to_string(r.seed) + "," + std::to_string(r.card) + "," +
                     fmt(r.A) + "," + fmt(r.B) + "\n";
        throw CalibrationError("no c in [" + fmt(opt.c_lo) + ", " + fmt(opt.c_hi) + "] reaches A/B >= " +
                               fmt(1.0 - delta), trace);
    }
    if (fail > 0.0) {
        for (int i = 0; i < opt.bisection_steps; ++i) {
            const double mid = std::sqrt(pass * fail);
            if (admissible(mid))
                pass = mid;
            else
                fail = mid;
        }
    }
    out.edge = pass;
    out.c0 = opt.safety * pass;
    return out;
}

Reconstruction reconstruct_from_samples(const SamplingSet& ss, const std::vector<double>& samples, double tol)
{
    if (samples.size() != ss.size())
        throw ArgumentError("one sample per lattice point expected");
    const FrameBounds fb = frame_bounds(ss);
    if (!(fb.A > 0.0))
        throw RankError("sampling set is not a frame for E_omega (A = 0): not reconstructible");
    const auto card = static_cast<Eigen::Index>(ss.size());
    Eigen::VectorXd wy(card);
    Eigen::VectorXd w(card);
    for (Eigen::Index k = 0; k < card; ++k) {
        w[k] = ss.weights[static_cast<std::size_t>(k)];
        wy[k] = w[k] * samples[static_cast<std::size_t>(k)];
    }
    const Eigen::VectorXd rhs = ss.U.transpose() * wy;
    auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        const Eigen::VectorXd t = w.cwiseProduct(ss.U * x);
        y.noalias() = ss.U.transpose() * t;
    };
    const int maxit = 10 * static_cast<int>(ss.basis->size());
    CgResult cg = conjugate_gradient(op, rhs, tol, maxit);
    if (!cg.converged)
        throw ConvergenceError("sampling reconstruction did not converge: relative residual " +
                                   fmt(cg.relative_residual),
                               cg.relative_residual);
    return {SpectralFunction(ss.basis, std::move(cg.x)), cg.iterations, cg.relative_residual};
}

} // namespace mf

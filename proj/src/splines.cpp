#include "mf/splines.hpp"

#include "mf/cubature.hpp"
#include "mf/errors.hpp"
#include "mf/format.hpp"
#include "mf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mf {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_rank(const Eigen::MatrixXd& E)
{
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(E.transpose());
    const auto card = E.rows();
    if (qr.rank() == card)
        return;
    std::vector<Eigen::Index> dep;
    for (Eigen::Index i = qr.rank(); i < card; ++i)
        dep.push_back(qr.colsPermutation().indices()[i]);
    std::sort(dep.begin(), dep.end());
    std::ostringstream os;
    for (std::size_t i = 0; i < dep.size(); ++i)
        os << (i ? ", " : "") << dep[i];
    throw RankError("interpolation matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(card) +
                    "; dependent nodes: " + os.str());
}

SplineSystem assemble(const Lattice& lattice, int k, BasisPtr basis, Eigen::MatrixXd E)
{
    SplineSystem sys;
    sys.lattice = lattice;
    sys.k = k;
    sys.basis = std::move(basis);
    sys.kernel_modes = sys.basis->zero_mode_count();
    const std::size_t n0 = sys.kernel_modes;
    const std::size_t dim = sys.basis->size();
    const std::size_t card = lattice.size();

    std::vector<double> nonzero;
    for (std::size_t m = n0; m < dim; ++m)
        nonzero.push_back(sys.basis->eigenvalue(m));
    sys.lambda_ref = nonzero[nonzero.size() / 2];
    sys.scale.resize(idx(dim - n0));
    for (std::size_t m = n0; m < dim; ++m)
        sys.scale[idx(m - n0)] = std::pow(sys.lambda_ref / sys.basis->eigenvalue(m), k);

    sys.E = std::move(E);
    if (n0 > 0)
        sys.kernel_qr.compute(sys.E.leftCols(idx(n0)));
    if (card == n0)
        return sys;
    Eigen::MatrixXd B = sys.E.rightCols(idx(dim - n0)) * sys.scale.asDiagonal();
    if (n0 > 0) {
        B.applyOnTheLeft(sys.kernel_qr.householderQ().transpose());
        sys.graded_qr.compute(B.bottomRows(idx(card - n0)).transpose());
    } else {
        sys.graded_qr.compute(B.transpose());
    }
    // rank was established on the unscaled matrix; the grading makes the relative
    // pivot test meaningless, so only exact breakdown is rejected here
    const auto d = sys.graded_qr.matrixR().diagonal().head(idx(card - n0));
    if (!(d.cwiseAbs().minCoeff() > 0.0) || !d.allFinite())
        throw RankError("spline system broke down after scaling (k = " + std::to_string(k) + ")");
    return sys;
}

struct Solved
{
    Eigen::MatrixXd c;
    Eigen::MatrixXd W;   // reduced variables, ||W||^2 = objective
    Eigen::MatrixXd Y;   // reduced right-hand side
    Eigen::MatrixXd eta; // multipliers of the reduced system
};

Solved solve(const SplineSystem& sys, const Eigen::MatrixXd& Z)
{
    if (Z.rows() != idx(sys.nodes()))
        throw ArgumentError("one value per lattice node expected");
    const std::size_t n0 = sys.kernel_modes;
    const std::size_t dim = sys.basis->size();
    const auto r = idx(sys.nodes() - n0);

    Solved out;
    if (n0 > 0 && sys.nodes() == n0) {
        out.Y.resize(0, Z.cols());
        out.W.resize(0, Z.cols());
        out.eta.resize(0, Z.cols());
        out.c = Eigen::MatrixXd::Zero(idx(dim), Z.cols());
        Eigen::MatrixXd rest = sys.kernel_qr.householderQ().transpose() * Z;
        out.c.topRows(idx(n0)) = sys.kernel_qr.matrixQR()
                                     .topLeftCorner(idx(n0), idx(n0))
                                     .template triangularView<Eigen::Upper>()
                                     .solve(rest.topRows(idx(n0)));
        return out;
    }
    if (n0 > 0) {
        Eigen::MatrixXd QtZ = sys.kernel_qr.householderQ().transpose() * Z;
        out.Y = QtZ.bottomRows(r);
    } else {
        out.Y = Z;
    }
    const auto& qr = sys.graded_qr;
    const auto R = qr.matrixR().topLeftCorner(r, r).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd PtY = qr.colsPermutation().transpose() * out.Y;
    out.W = R.transpose().solve(PtY);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(idx(dim - n0), Z.cols());
    full.topRows(r) = out.W;
    full.applyOnTheLeft(qr.householderQ());
    out.eta = qr.colsPermutation() * Eigen::MatrixXd(R.solve(out.W));

    out.c.resize(idx(dim), Z.cols());
    out.c.bottomRows(idx(dim - n0)) = sys.scale.asDiagonal() * full;
    if (n0 > 0) {
        Eigen::MatrixXd rest = Z - sys.E.rightCols(idx(dim - n0)) * out.c.bottomRows(idx(dim - n0));
        rest.applyOnTheLeft(sys.kernel_qr.householderQ().transpose());
        out.c.topRows(idx(n0)) = sys.kernel_qr.matrixQR()
                                     .topLeftCorner(idx(n0), idx(n0))
                                     .template triangularView<Eigen::Upper>()
                                     .solve(rest.topRows(idx(n0)));
    }
    return out;
}

} // namespace

double spline_band(const ManifoldSpec& manifold, std::size_t card, double min_band, double dim_factor)
{
    const double need = dim_factor * static_cast<double>(card);
    double band = std::max(min_band, first_positive_eigenvalue(manifold));
    while (static_cast<double>(enumerate_basis(manifold, band)->size()) < need)
        band *= 1.25;
    return band;
}

SplineSystem build_spline_system(const Lattice& lattice, int k, double band)
{
    if (k < 1)
        throw ArgumentError("spline order k must be a positive integer");
    if (lattice.size() == 0)
        throw ArgumentError("spline needs at least one node");
    BasisPtr basis = enumerate_basis(lattice.manifold, band);
    if (basis->size() < lattice.size())
        throw ArgumentError("spline band " + fmt(band) + " holds " + std::to_string(basis->size()) +
                            " modes, fewer than the " + std::to_string(lattice.size()) + " nodes");
    Eigen::MatrixXd E = sample_matrix(*basis, lattice.points);
    check_rank(E);
    return assemble(lattice, k, std::move(basis), std::move(E));
}

Eigen::MatrixXd interpolate_many(const SplineSystem& sys, const Eigen::MatrixXd& Z) { return solve(sys, Z).c; }

SplineSolution interpolate_solution(const SplineSystem& sys, const Eigen::VectorXd& z)
{
    const Solved s = solve(sys, Eigen::MatrixXd(z));
    SplineSolution out{SpectralFunction(sys.basis, s.c.col(0)), s.W.squaredNorm(), 0.0, 0.0};
    out.dual_objective = s.Y.col(0).dot(s.eta.col(0));
    out.residual = (sys.E * s.c.col(0) - z).cwiseAbs().maxCoeff();
    return out;
}

SpectralFunction interpolate(const SplineSystem& sys, const Eigen::VectorXd& z)
{
    return SpectralFunction(sys.basis, solve(sys, Eigen::MatrixXd(z)).c.col(0));
}

SpectralFunction lagrangian_spline(const SplineSystem& sys, std::size_t gamma)
{
    if (gamma >= sys.nodes())
        throw ArgumentError("node index out of range");
    Eigen::VectorXd z = Eigen::VectorXd::Zero(idx(sys.nodes()));
    z[idx(gamma)] = 1.0;
    return interpolate(sys, z);
}

double spline_objective(const SplineSystem& sys, const SpectralFunction& g)
{
    const SpectralFunction h = rebase(g, sys.basis);
    double sum = 0.0;
    for (std::size_t m = sys.kernel_modes; m < sys.basis->size(); ++m) {
        const double v = h.coefficient(m) / sys.scale[idx(m - sys.kernel_modes)];
        sum += v * v;
    }
    return sum;
}

std::vector<int> spline_orders(const ManifoldSpec& manifold, int l_max)
{
    std::vector<int> out;
    for (int l = 0; l <= l_max; ++l)
        out.push_back((1 << l) * manifold.dim);
    return out;
}

double SplineTable::rho_sqrt_omega() const { return rho * std::sqrt(omega); }

SplineTable spline_reconstruct(const SpectralFunction& f, const Lattice& lattice, const std::vector<int>& orders,
                               const SplineOptions& opt)
{
    if (orders.empty())
        throw ArgumentError("empty spline order schedule");
    const ManifoldSpec& M = lattice.manifold;
    SplineTable t;
    t.rho = lattice.rho;
    t.omega = f.band();
    t.nodes = lattice.size();
    t.band = opt.band > 0.0 ? opt.band
                            : spline_band(M, lattice.size(),
                                          opt.band_factor * std::max(t.omega, first_positive_eigenvalue(M)),
                                          opt.dim_factor);

    BasisPtr basis = enumerate_basis(M, t.band);
    const Eigen::VectorXd cf = rebase(f, basis).coefficients();
    Eigen::MatrixXd E = sample_matrix(*basis, lattice.points);
    check_rank(E);
    const Eigen::VectorXd z = E * cf;
    t.floor = 256.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, z.cwiseAbs().maxCoeff());

    std::vector<Point> probes = probe_grid(M, opt.probe_factor * lattice.rho);
    t.probes = probes.size();
    const SampleOperator P(basis, std::move(probes));

    for (int k : orders) {
        const SplineSystem sys = assemble(lattice, k, basis, E);
        const Solved s = solve(sys, Eigen::MatrixXd(z));
        const Eigen::VectorXd d = s.c.col(0) - cf;
        SplineRow row{k, 0.0, d.norm(), (E * s.c.col(0) - z).cwiseAbs().maxCoeff()};
        row.sup_error = P.apply(Eigen::MatrixXd(d)).cwiseAbs().maxCoeff();
        if (!t.rows.empty() && row.sup_error > std::max(t.rows.back().sup_error, t.floor)) {
            t.monotone = false;
            if (!t.diverged_at)
                t.diverged_at = k;
        }
        t.rows.push_back(row);
    }

    // log sup_error = a + k log q
    double sk = 0, sy = 0, skk = 0, sky = 0;
    int n = 0;
    for (const SplineRow& r : t.rows) {
        if (!(r.sup_error > t.floor))
            continue;
        const double y = std::log(r.sup_error);
        sk += r.k;
        sy += y;
        skk += static_cast<double>(r.k) * r.k;
        sky += r.k * y;
        ++n;
    }
    if (n >= 2 && n * skk - sk * sk > 0.0)
        t.fitted_rate = std::exp((n * sky - sk * sy) / (n * skk - sk * sk));
    return t;
}

} // namespace mf

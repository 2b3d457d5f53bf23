#include "mf/cubature.hpp"

#include "mf/errors.hpp"
#include "mf/format.hpp"
#include "mf/linalg.hpp"
#include "mf/quadrature.hpp"
#include "mf/rng.hpp"
#include "mf/sampling.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mf {

namespace {

constexpr std::size_t chunk_entries = 4'000'000;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Rows of the circle-mode table (indices 0..2K) at one coordinate of every node.
Eigen::MatrixXd axis_table(const std::vector<Point>& nodes, int axis, int K)
{
    const auto circle = enumerate_basis(ManifoldSpec::of(Kind::Circle), static_cast<double>(K) * K);
    const auto P = static_cast<Eigen::Index>(2 * K + 1);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t(idx(nodes.size()), P);
    for (std::size_t k = 0; k < nodes.size(); ++k)
        circle->eval_all(circle_point(nodes[k].c[static_cast<std::size_t>(axis)]),
                         std::span<double>(t.row(idx(k)).data(), static_cast<std::size_t>(P)));
    return t;
}

} // namespace

SampleOperator::SampleOperator(BasisPtr basis, std::vector<Point> nodes, std::size_t dense_limit)
  : basis_(std::move(basis)), nodes_(std::move(nodes))
{
    if (basis_->manifold().kind == Kind::Torus2) {
        mode_ = Mode::Separable;
        const int K = basis_->max_frequency();
        axis_modes_ = 2 * K + 1;
        C1_ = axis_table(nodes_, 0, K);
        C2_ = axis_table(nodes_, 1, K);
        ax1_.resize(basis_->size());
        ax2_.resize(basis_->size());
        for (std::size_t m = 0; m < basis_->size(); ++m) {
            ax1_[m] = basis_->mode(m).a;
            ax2_[m] = basis_->mode(m).b;
        }
    } else if (nodes_.size() * basis_->size() <= dense_limit) {
        mode_ = Mode::Dense;
        U_ = sample_matrix(*basis_, nodes_);
    } else {
        mode_ = Mode::Chunked;
    }
}

Eigen::MatrixXd SampleOperator::chunk(std::size_t begin, std::size_t end) const
{
    const std::vector<Point> part(nodes_.begin() + static_cast<std::ptrdiff_t>(begin),
                                  nodes_.begin() + static_cast<std::ptrdiff_t>(end));
    return sample_matrix(*basis_, part);
}

Eigen::MatrixXd SampleOperator::apply(const Eigen::MatrixXd& coef) const
{
    if (coef.rows() != idx(modes()))
        throw ArgumentError("sample operator: coefficient rows must match the basis size");
    const std::size_t n = nodes();
    Eigen::MatrixXd out(idx(n), coef.cols());
    switch (mode_) {
    case Mode::Dense:
        out.noalias() = U_ * coef;
        break;
    case Mode::Separable: {
        Eigen::MatrixXd V(axis_modes_, axis_modes_);
        for (Eigen::Index i = 0; i < coef.cols(); ++i) {
            V.setZero();
            for (std::size_t m = 0; m < ax1_.size(); ++m)
                V(ax1_[m], ax2_[m]) = coef(idx(m), i);
            const Eigen::MatrixXd T = C1_ * V;
            out.col(i) = T.cwiseProduct(C2_).rowwise().sum();
        }
        break;
    }
    case Mode::Chunked: {
        const std::size_t rows = std::max<std::size_t>(64, chunk_entries / std::max<std::size_t>(1, modes()));
        for (std::size_t b = 0; b < n; b += rows) {
            const std::size_t e = std::min(n, b + rows);
            out.middleRows(idx(b), idx(e - b)).noalias() = chunk(b, e) * coef;
        }
        break;
    }
    }
    return out;
}

Eigen::MatrixXd SampleOperator::apply_transpose(const Eigen::MatrixXd& values) const
{
    if (values.rows() != idx(nodes()))
        throw ArgumentError("sample operator: value rows must match the node count");
    const std::size_t n = nodes();
    Eigen::MatrixXd out(idx(modes()), values.cols());
    switch (mode_) {
    case Mode::Dense:
        out.noalias() = U_.transpose() * values;
        break;
    case Mode::Separable: {
        for (Eigen::Index i = 0; i < values.cols(); ++i) {
            const Eigen::MatrixXd G = C1_.transpose() * (values.col(i).asDiagonal() * C2_);
            for (std::size_t m = 0; m < ax1_.size(); ++m)
                out(idx(m), i) = G(ax1_[m], ax2_[m]);
        }
        break;
    }
    case Mode::Chunked: {
        out.setZero();
        const std::size_t rows = std::max<std::size_t>(64, chunk_entries / std::max<std::size_t>(1, modes()));
        for (std::size_t b = 0; b < n; b += rows) {
            const std::size_t e = std::min(n, b + rows);
            out.noalias() += chunk(b, e).transpose() * values.middleRows(idx(b), idx(e - b));
        }
        break;
    }
    }
    return out;
}

ProductAnalyzer::ProductAnalyzer(const ManifoldSpec& manifold, double omega) : manifold_(manifold), omega_(omega)
{
    if (!manifold.homogeneous())
        throw UnsupportedError("product property needs a homogeneous manifold; " + manifold.name() + " is not");
    if (!(omega >= 0.0))
        throw ArgumentError("omega must be nonnegative");
    const double m = *manifold.group_dim;
    limit_ = 4.0 * m * omega;
    const double wide = 8.0 * m * omega;
    wide_ = enumerate_basis(manifold, wide);
    QuadratureRule rule = exact_rule(manifold, wide, wide);
    weights_ = std::move(rule.weights);
    sampler_ = std::make_shared<SampleOperator>(wide_, std::move(rule.points));
}

ProductReport ProductAnalyzer::check(const SpectralFunction& f, const SpectralFunction& g) const
{
    const double tol = omega_ * (1.0 + 1e-12);
    if (f.band() > tol || g.band() > tol)
        throw ArgumentError("product check: f and g must lie in E_" + fmt(omega_));
    Eigen::MatrixXd c(idx(wide_->size()), 2);
    c.col(0) = rebase(f, wide_).coefficients();
    c.col(1) = rebase(g, wide_).coefficients();
    const Eigen::MatrixXd v = sampler_->apply(c);
    Eigen::VectorXd p(v.rows());
    for (Eigen::Index k = 0; k < v.rows(); ++k)
        p[k] = weights_[static_cast<std::size_t>(k)] * v(k, 0) * v(k, 1);
    const Eigen::VectorXd fg = sampler_->apply_transpose(p).col(0);

    ProductReport r;
    r.omega = omega_;
    r.limit = limit_;
    r.analysis_band = wide_->band();
    for (std::size_t m = 0; m < wide_->size(); ++m) {
        const double e = fg[idx(m)] * fg[idx(m)];
        r.total_energy += e;
        if (wide_->eigenvalue(m) > limit_ * (1.0 + 1e-12))
            r.outside_energy += e;
    }
    return r;
}

ProductReport product_band_check(const SpectralFunction& f, const SpectralFunction& g, double omega)
{
    return ProductAnalyzer(f.basis().manifold(), omega).check(f, g);
}

CubatureRule build_cubature(const Lattice& lattice, double omega, const CubatureOptions& opt)
{
    const ManifoldSpec& M = lattice.manifold;
    const BasisPtr basis = enumerate_basis(M, omega);
    const std::size_t dim = basis->size();
    const std::size_t card = lattice.size();
    if (dim == 0)
        throw ArgumentError("E_" + fmt(omega) + " is empty on " + M.name());
    if (card < dim)
        throw RankError("moment system is underdetermined: " + std::to_string(card) + " points for " +
                        std::to_string(dim) + " moments");

    CubatureRule rule;
    rule.lattice = lattice;
    rule.omega = omega;
    rule.moments = dim;
    rule.voronoi = voronoi_masses(lattice);
    const Eigen::Map<const Eigen::VectorXd> mu(rule.voronoi.data(), idx(card));
    const Eigen::VectorXd b = mode_integrals(*basis);

    const SampleOperator S(basis, lattice.points, opt.dense_limit);
    // E x = S^T x (moments of node values), E^T v = S v (node values of coefficients)
    auto moments_of = [&](const Eigen::VectorXd& values) -> Eigen::VectorXd { return S.apply_transpose(values).col(0); };
    auto values_of = [&](const Eigen::VectorXd& coef) -> Eigen::VectorXd { return S.apply(coef).col(0); };

    const Eigen::VectorXd r0 = b - moments_of(mu);
    Eigen::VectorXd nu;
    if (dim <= opt.dense_solve_max) {
        const Eigen::MatrixXd U = S.dense().size() ? S.dense() : sample_matrix(*basis, lattice.points);
        const Eigen::MatrixXd G = U.transpose() * mu.asDiagonal() * U;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
        const Eigen::VectorXd d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 1e-13 * dmax))
            throw RankError("moment system is singular: min pivot " + fmt(d.minCoeff()) + " against max " +
                            fmt(dmax));
        nu = ldlt.solve(r0);
        nu += ldlt.solve(r0 - G * nu);
    } else {
        auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            y = moments_of(mu.cwiseProduct(values_of(x)));
        };
        const int maxit = 20 * static_cast<int>(dim);
        CgResult cg = conjugate_gradient(op, r0, opt.cg_tol, maxit);
        if (!cg.converged)
            throw RankError("moment system is singular or ill-conditioned: CG residual " +
                            fmt(cg.relative_residual) + " after " + std::to_string(cg.iterations) + " iterations");
        nu = std::move(cg.x);
        rule.iterations = cg.iterations;
        // one refinement step against the true residual
        Eigen::VectorXd gnu;
        op(nu, gnu);
        CgResult fix = conjugate_gradient(op, r0 - gnu, opt.cg_tol, maxit);
        nu += fix.x;
        rule.iterations += fix.iterations;
    }

    const Eigen::VectorXd alpha = mu.cwiseProduct(Eigen::VectorXd::Ones(idx(card)) + values_of(nu));
    rule.weights.assign(alpha.data(), alpha.data() + card);
    const double vol = std::pow(lattice.rho, M.dim);
    rule.c1 = alpha.minCoeff() / vol;
    rule.c2 = alpha.maxCoeff() / vol;
    if (!(alpha.minCoeff() > 0.0))
        throw ValidationError("density insufficient - decrease rho (min weight " + fmt(alpha.minCoeff()) +
                              " at rho = " + fmt(lattice.rho) + ", omega = " + fmt(omega) + ")");
    rule.max_moment_error = (moments_of(alpha) - b).cwiseAbs().maxCoeff();
    return rule;
}

Eigen::VectorXd cubature_moment_errors(const CubatureRule& rule)
{
    const BasisPtr basis = enumerate_basis(rule.lattice.manifold, rule.omega);
    const SampleOperator S(basis, rule.lattice.points);
    const Eigen::Map<const Eigen::VectorXd> alpha(rule.weights.data(), idx(rule.weights.size()));
    return S.apply_transpose(alpha).col(0) - mode_integrals(*basis);
}

A0Calibration calibrate_a0(const ManifoldSpec& manifold, const std::vector<double>& omegas, std::uint64_t seed,
                           const A0Options& opt)
{
    if (omegas.empty())
        throw ArgumentError("calibration needs at least one omega");
    A0Calibration out;
    const int seeds = opt.seeds > 0 ? opt.seeds : (manifold.dim == 1 ? 10 : 3);
    auto admissible = [&](double a) {
        for (double w : omegas)
            for (int s = 0; s < seeds; ++s) {
                const std::uint64_t ls = derive_seed(seed, "calibrate-a0", static_cast<std::uint64_t>(s));
                A0TraceRow row{a, w, ls, 0, false, 0.0, 0.0};
                bool ok = false;
                try {
                    const Lattice L = generate_lattice(manifold, a / std::sqrt(w + 1.0), ls);
                    row.card = L.size();
                    const CubatureRule r = build_cubature(L, w, opt.cubature);
                    row.positive = true;
                    row.spread = r.spread();
                    row.moment_error = r.max_moment_error;
                    ok = r.spread() <= opt.max_spread && r.max_moment_error <= opt.moment_tol;
                } catch (const Error&) {
                }
                out.trace.push_back(row);
                if (!ok)
                    return false;
            }
        return true;
    };

    double pass = 0.0, fail = 0.0;
    for (double a = opt.a_hi; a >= opt.a_lo; a /= opt.scan_factor) {
        if (admissible(a)) {
            pass = a;
            break;
        }
        fail = a;
    }
    if (pass == 0.0) {
        std::string trace = "a,omega,seed,card,positive,spread,moment_error\n";
        for (const A0TraceRow& r : out.trace)
            trace += fmt(r.a) + "," + fmt(r.omega) + "," + std::to_string(r.seed) + "," + std::to_string(r.card) + "," + (r.positive ? "1" : "0") +
                     "," + fmt(r.spread) + "," + fmt(r.moment_error) + "\n";
        throw CalibrationError("no a in [" + fmt(opt.a_lo) + ", " + fmt(opt.a_hi) +
                               "] gives positive exact cubature with spread <= " + fmt(opt.max_spread), trace);
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
    out.a0 = opt.safety * pass;
    return out;
}

std::size_t ParsevalFrame::atom_count() const
{
    if (scales.empty())
        return 0;
    const ParsevalScale& s = scales.back();
    return s.first_atom + rules[s.rule]->lattice.size();
}

namespace {

const ParsevalScale& scale_of(const ParsevalFrame& pf, std::size_t i)
{
    if (i >= pf.atom_count())
        throw ArgumentError("atom index out of range");
    const auto it = std::upper_bound(pf.scales.begin(), pf.scales.end(), i,
                                     [](std::size_t v, const ParsevalScale& s) { return v < s.first_atom; });
    return *(it - 1);
}

// Phi(4^-j lambda_m) over the first n modes of the frame basis.
Eigen::VectorXd filter_column(const ParsevalFrame& pf, int j, std::size_t n)
{
    Eigen::VectorXd phi(idx(n));
    for (std::size_t m = 0; m < n; ++m)
        phi[idx(m)] = pf.filter.phi_at(j, pf.basis->eigenvalue(m));
    return phi;
}

Eigen::VectorXd sqrt_weights(const CubatureRule& r)
{
    Eigen::VectorXd s(idx(r.weights.size()));
    for (std::size_t k = 0; k < r.weights.size(); ++k)
        s[idx(k)] = std::sqrt(r.weights[k]);
    return s;
}

} // namespace

int ParsevalFrame::atom_scale(std::size_t i) const { return scale_of(*this, i).j; }

SpectralFunction ParsevalFrame::atom(std::size_t i) const
{
    const ParsevalScale& s = scale_of(*this, i);
    const CubatureRule& r = *rules[s.rule];
    const std::size_t k = i - s.first_atom;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(idx(basis->size()));
    std::vector<double> u(basis->size());
    basis->eval_all(r.lattice.points[k], u);
    const double sb = std::sqrt(r.weights[k]);
    for (std::size_t m = 0; m < basis->size(); ++m)
        c[idx(m)] = sb * filter.phi_at(s.j, basis->eigenvalue(m)) * u[m];
    return SpectralFunction(basis, std::move(c));
}

ParsevalFrame build_parseval_frame(const ManifoldSpec& manifold, const FilterBank& fb, const ParsevalOptions& opt,
                                   std::uint64_t seed)
{
    if (!manifold.homogeneous())
        throw UnsupportedError("Parseval frame needs a homogeneous manifold; " + manifold.name() + " is not");
    if (!(opt.a0 > 0.0))
        throw CalibrationError("a0 is not calibrated (run calibrate first)");
    if (opt.j_min > opt.j_max)
        throw ArgumentError("j_min exceeds j_max");

    ParsevalFrame pf{manifold, fb, enumerate_basis(manifold, opt.band), opt, {}, {}, {}, {}};
    std::vector<double> rule_omega;
    std::size_t next = 0;
    for (int j = opt.j_min; j <= opt.j_max; ++j) {
        const double omega = std::min(scale_band_hi(j), opt.band);
        const double cb = opt.product_factor * omega;
        auto found = std::find(rule_omega.begin(), rule_omega.end(), omega);
        std::size_t ri = static_cast<std::size_t>(found - rule_omega.begin());
        if (found == rule_omega.end()) {
            double rho = opt.a0 / std::sqrt(cb + 1.0);
            std::shared_ptr<const CubatureRule> rule;
            int attempt = 0;
            for (;; ++attempt) {
                try {
                    const std::uint64_t ls =
                        derive_seed(seed, "parseval-rule", static_cast<std::uint64_t>(rule_omega.size() * 64 + attempt));
                    const Lattice L = generate_lattice(manifold, rho, ls);
                    rule = std::make_shared<CubatureRule>(build_cubature(L, cb, opt.cubature));
                    break;
                } catch (const ValidationError& e) {
                    if (attempt >= opt.max_retries)
                        throw ValidationError("cubature failed at scale j = " + std::to_string(j) + ": " + e.what());
                } catch (const RankError& e) {
                    if (attempt >= opt.max_retries)
                        throw RankError("cubature failed at scale j = " + std::to_string(j) + ": " + e.what());
                }
                rho *= 0.5;
            }
            rule_omega.push_back(omega);
            pf.rules.push_back(rule);
            pf.retries.push_back(attempt);
            pf.samplers.push_back(std::make_shared<SampleOperator>(enumerate_basis(manifold, omega),
                                                                   rule->lattice.points, opt.cubature.dense_limit));
        }
        pf.scales.push_back({j, omega, cb, ri, next});
        next += pf.rules[ri]->lattice.size();
    }
    return pf;
}

Eigen::MatrixXd parseval_analysis(const Eigen::MatrixXd& coef, const ParsevalFrame& pf)
{
    if (coef.rows() != idx(pf.basis->size()))
        throw ArgumentError("coefficient rows must match the frame basis");
    Eigen::MatrixXd out(idx(pf.atom_count()), coef.cols());
    for (const ParsevalScale& s : pf.scales) {
        const SampleOperator& S = *pf.samplers[s.rule];
        const std::size_t n = S.modes();
        const Eigen::VectorXd phi = filter_column(pf, s.j, n);
        const Eigen::MatrixXd v = S.apply(phi.asDiagonal() * coef.topRows(idx(n)));
        out.middleRows(idx(s.first_atom), v.rows()) = sqrt_weights(*pf.rules[s.rule]).asDiagonal() * v;
    }
    return out;
}

Eigen::VectorXd parseval_analysis(const SpectralFunction& f, const ParsevalFrame& pf)
{
    std::vector<int> have;
    for (const ParsevalScale& s : pf.scales)
        have.push_back(s.j);
    const auto miss = missing_scales(f, pf.filter, have);
    if (!miss.empty()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < miss.size(); ++i)
            os << (i ? ", " : "") << miss[i];
        throw TruncationError("Parseval frame lacks scales j = " + os.str() + " needed by the function's spectrum");
    }
    return parseval_analysis(Eigen::MatrixXd(rebase(f, pf.basis).coefficients()), pf).col(0);
}

ParsevalEnergy parseval_check(const SpectralFunction& f, const ParsevalFrame& pf)
{
    const Eigen::VectorXd a = parseval_analysis(f, pf);
    ParsevalEnergy e;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        e.frame_energy += a[i] * a[i];
    e.norm_energy = f.without_kernel().squared_norm();
    return e;
}

Eigen::MatrixXd parseval_synthesis(const Eigen::MatrixXd& coefficients, const ParsevalFrame& pf)
{
    if (coefficients.rows() != idx(pf.atom_count()))
        throw ArgumentError("one coefficient row per atom expected");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(idx(pf.basis->size()), coefficients.cols());
    for (const ParsevalScale& s : pf.scales) {
        const SampleOperator& S = *pf.samplers[s.rule];
        const std::size_t n = S.modes();
        const Eigen::VectorXd phi = filter_column(pf, s.j, n);
        const Eigen::MatrixXd a =
            sqrt_weights(*pf.rules[s.rule]).asDiagonal() * coefficients.middleRows(idx(s.first_atom), idx(S.nodes()));
        out.topRows(idx(n)) += phi.asDiagonal() * S.apply_transpose(a);
    }
    return out;
}

SpectralFunction parseval_reconstruct(const Eigen::VectorXd& coefficients, const ParsevalFrame& pf)
{
    return SpectralFunction(pf.basis, parseval_synthesis(Eigen::MatrixXd(coefficients), pf).col(0));
}

} // namespace mf

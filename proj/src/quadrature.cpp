#include "mf/quadrature.hpp"

#include "mf/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mf {

namespace {
constexpr double pi = std::numbers::pi;
}

GaussLegendre gauss_legendre(int n)
{
    if (n < 1)
        throw ArgumentError("Gauss-Legendre rule needs at least one node");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[n - 1 - i] = x;
        gl.nodes[i] = -x;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        gl.nodes[n / 2] = 0.0;
    return gl;
}

bool QuadratureRule::exact_for(double band1, double band2) const
{
    const int k1 = band_frequency(kind, band1);
    const int k2 = band_frequency(kind, band2);
    return k1 + k2 <= capacity;
}

namespace {

QuadratureRule make_rule(const ManifoldSpec& M, int total, double spacing)
{
    QuadratureRule r;
    r.kind = M.kind;
    auto at_least = [](int n, double extent, double h) {
        if (h > 0.0 && std::isfinite(h))
            n = std::max(n, static_cast<int>(std::ceil(extent / h - 1e-9)));
        return std::max(n, 1);
    };
    switch (M.kind) {
    case Kind::Circle: {
        const int n = at_least(total + 1, 2.0 * pi, spacing);
        r.capacity = n - 1;
        for (int i = 0; i < n; ++i) {
            r.points.push_back(circle_point(2.0 * pi * i / n));
            r.weights.push_back(2.0 * pi / n);
        }
        break;
    }
    case Kind::Torus2: {
        const int n = at_least(total + 1, 2.0 * pi, spacing);
        r.capacity = n - 1;
        const double w = 4.0 * pi * pi / (double(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                r.points.push_back(torus_point(2.0 * pi * i / n, 2.0 * pi * j / n));
                r.weights.push_back(w);
            }
        break;
    }
    case Kind::Sphere2: {
        // z-degree total needs ceil((total+1)/2) GL nodes; longitudes need total+1.
        const int nt = at_least(total / 2 + 1, pi, spacing);
        const int np = at_least(total + 1, 2.0 * pi, spacing);
        r.capacity = std::min(2 * nt - 1, np - 1);
        const GaussLegendre gl = gauss_legendre(nt);
        for (int i = 0; i < nt; ++i) {
            const double z = gl.nodes[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            for (int j = 0; j < np; ++j) {
                const double phi = 2.0 * pi * j / np;
                r.points.push_back(sphere_point(s * std::cos(phi), s * std::sin(phi), z));
                r.weights.push_back(gl.weights[i] * 2.0 * pi / np);
            }
        }
        break;
    }
    case Kind::IntervalDirichlet: {
        const int n = at_least(total / 2 + 1, pi, spacing);
        r.capacity = 2 * n - 1;
        for (int i = 0; i < n; ++i) {
            r.points.push_back(interval_point((i + 0.5) * pi / n));
            r.weights.push_back(pi / n);
        }
        break;
    }
    }
    return r;
}

} // namespace

QuadratureRule exact_rule(const ManifoldSpec& manifold, double band1, double band2)
{
    const int total = band_frequency(manifold.kind, band1) + band_frequency(manifold.kind, band2);
    return make_rule(manifold, total, 0.0);
}

QuadratureRule fine_rule(const ManifoldSpec& manifold, double spacing, double band1, double band2)
{
    const int total = band_frequency(manifold.kind, band1) + band_frequency(manifold.kind, band2);
    return make_rule(manifold, total, spacing);
}

SpectralFunction analyze(BasisPtr basis, const std::function<double(const Point&)>& f, double f_band,
                         const QuadratureRule& rule)
{
    if (rule.kind != basis->manifold().kind)
        throw ArgumentError("quadrature rule and basis live on different manifolds");
    if (!rule.exact_for(f_band, basis->band())) {
        std::ostringstream os;
        os << "quadrature of capacity " << rule.capacity << " is not exact for band " << f_band
           << " against basis band " << basis->band() << "; raise the quadrature order";
        throw QuadratureError(os.str());
    }
    const std::size_t n = basis->size();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<double> u(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double v = rule.weights[q] * f(rule.points[q]);
        if (v == 0.0)
            continue;
        basis->eval_all(rule.points[q], u);
        for (std::size_t m = 0; m < n; ++m)
            c[static_cast<Eigen::Index>(m)] += v * u[m];
    }
    return {std::move(basis), std::move(c)};
}

Eigen::VectorXd mode_integrals(const SpectralBasis& basis)
{
    const std::size_t n = basis.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<double> u(n);
    if (basis.manifold().kind == Kind::IntervalDirichlet) {
        // Single sines are not products of two modes; a Gauss-Legendre rule with
        // generous head-room integrates them to machine precision.
        const int ng = basis.max_frequency() + 48;
        const GaussLegendre gl = gauss_legendre(ng);
        for (int i = 0; i < ng; ++i) {
            const double x = 0.5 * pi * (gl.nodes[i] + 1.0);
            basis.eval_all(interval_point(x), u);
            const double w = 0.5 * pi * gl.weights[i];
            for (std::size_t m = 0; m < n; ++m)
                out[static_cast<Eigen::Index>(m)] += w * u[m];
        }
        return out;
    }
    const QuadratureRule rule = exact_rule(basis.manifold(), basis.band(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        basis.eval_all(rule.points[q], u);
        for (std::size_t m = 0; m < n; ++m)
            out[static_cast<Eigen::Index>(m)] += rule.weights[q] * u[m];
    }
    return out;
}

Eigen::MatrixXd gram_matrix(const SpectralBasis& basis)
{
    const QuadratureRule rule = exact_rule(basis.manifold(), basis.band(), basis.band());
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd U(static_cast<Eigen::Index>(rule.size()), n);
    std::vector<double> u(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        basis.eval_all(rule.points[q], u);
        const double sw = std::sqrt(rule.weights[q]);
        for (Eigen::Index m = 0; m < n; ++m)
            U(static_cast<Eigen::Index>(q), m) = sw * u[static_cast<std::size_t>(m)];
    }
    return U.transpose() * U;
}

} // namespace mf

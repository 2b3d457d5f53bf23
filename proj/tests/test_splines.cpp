#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mf/errors.hpp"
#include "mf/rng.hpp"
#include "mf/sampling.hpp"
#include "mf/splines.hpp"

#include <cmath>
#include <numbers>

using namespace mf;
using std::numbers::pi;

namespace {

Lattice circle_nodes(const std::vector<double>& angles, double rho)
{
    Lattice L{ManifoldSpec::of(Kind::Circle), {}, rho, {}};
    for (double a : angles)
        L.points.push_back(circle_point(a));
    return L;
}

Lattice uniform_circle(int n)
{
    std::vector<double> a;
    for (int k = 0; k < n; ++k)
        a.push_back(2.0 * pi * k / n);
    return circle_nodes(a, 4.0 * pi / n);
}

Eigen::VectorXd node_values(const SplineSystem& sys, const SpectralFunction& g)
{
    return sys.E * rebase(g, sys.basis).coefficients();
}

} // namespace

TEST_CASE("one node gives the constant spline")
{
    const SplineSystem sys = build_spline_system(circle_nodes({1.0}, 1.0), 3, 100.0);
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(1, 2.5);
    const SpectralFunction s = interpolate(sys, z);
    CHECK(s.coefficient(0) == doctest::Approx(2.5 * std::sqrt(2.0 * pi)));
    CHECK(s.without_kernel().norm() == 0.0);
}

TEST_CASE("constant and zero data reproduce themselves")
{
    for (Kind kind : {Kind::Circle, Kind::Torus2, Kind::Sphere2}) {
        const auto M = ManifoldSpec::of(kind);
        const Lattice L = generate_lattice(M, 0.8, 2);
        const SplineSystem sys = build_spline_system(L, 2 * M.dim, spline_band(M, L.size(), 16.0));
        const SpectralFunction one = interpolate(sys, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(L.size())));
        CHECK(one.without_kernel().norm() < 1e-10);
        CHECK(one.coefficient(0) == doctest::Approx(std::sqrt(M.volume)).epsilon(1e-10));
        CHECK(interpolate(sys, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(L.size()))).norm() == 0.0);
    }
}

TEST_CASE("interpolation, duality and linearity")
{
    for (Kind kind : {Kind::Circle, Kind::Torus2, Kind::Sphere2, Kind::IntervalDirichlet}) {
        const auto M = ManifoldSpec::of(kind);
        const Lattice L = generate_lattice(M, 0.7, 5);
        for (int k : spline_orders(M, 2)) {
            const SplineSystem sys = build_spline_system(L, k, spline_band(M, L.size(), 16.0));
            Rng rng(derive_seed(1, "spline", static_cast<std::uint64_t>(k)));
            std::normal_distribution<double> g;
            Eigen::VectorXd z1(static_cast<Eigen::Index>(L.size())), z2(z1.size());
            for (Eigen::Index i = 0; i < z1.size(); ++i) {
                z1[i] = g(rng);
                z2[i] = g(rng);
            }
            const SplineSolution s1 = interpolate_solution(sys, z1);
            CHECK(s1.residual <= 1e-9);
            CHECK(std::abs(s1.objective - s1.dual_objective) <= 1e-9 * s1.objective);
            CHECK(spline_objective(sys, s1.s) == doctest::Approx(s1.objective).epsilon(1e-9));
            const SpectralFunction lhs = interpolate(sys, 2.0 * z1 - 3.0 * z2);
            const SpectralFunction rhs = 2.0 * s1.s - 3.0 * interpolate(sys, z2);
            CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());
        }
    }
}

TEST_CASE("the spline minimises the objective among interpolants")
{
    const auto M = ManifoldSpec::of(Kind::Torus2);
    const Lattice L = generate_lattice(M, 0.9, 7);
    const SplineSystem sys = build_spline_system(L, 4, spline_band(M, L.size(), 16.0));
    Rng rng(3);
    const auto low = enumerate_basis(M, 30.0);
    const Eigen::VectorXd z = node_values(sys, random_function(low, 30.0, rng));
    const SpectralFunction s = interpolate(sys, z);
    const double base = spline_objective(sys, s);
    for (int i = 0; i < 10; ++i) {
        // v = g - s(g) vanishes on the nodes
        const SpectralFunction g = random_function(sys.basis, 60.0, rng);
        const SpectralFunction v = rebase(g, sys.basis) - interpolate(sys, node_values(sys, g));
        CHECK((sys.E * v.coefficients()).cwiseAbs().maxCoeff() < 1e-9);
        for (double eps : {1e-3, -1e-3})
            CHECK(spline_objective(sys, s + eps * v) >= base);
    }
}

TEST_CASE("Lagrangian splines")
{
    const Lattice L = uniform_circle(12);
    const SplineSystem sys = build_spline_system(L, 2, 4000.0);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.basis->size()));
    std::vector<SpectralFunction> ls;
    for (std::size_t g = 0; g < L.size(); ++g) {
        ls.push_back(lagrangian_spline(sys, g));
        const Eigen::VectorXd at = sys.E * ls.back().coefficients();
        for (Eigen::Index i = 0; i < at.size(); ++i)
            CHECK(std::abs(at[i] - (static_cast<std::size_t>(i) == g ? 1.0 : 0.0)) <= 1e-9);
        total += ls.back().coefficients();
    }
    // superposition of the cardinal splines is the constant spline
    const SpectralFunction one = interpolate(sys, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(L.size())));
    CHECK((total - one.coefficients()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(one.without_kernel().norm() <= 1e-9);

    // neighbouring cardinal splines are rotations of each other
    const double h = 2.0 * pi / 12;
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const double t = 2.0 * pi * i / 200;
        worst = std::max(worst, std::abs(ls[0](circle_point(t)) - ls[1](circle_point(t + h))));
    }
    CHECK(worst <= 1e-9);

    // superposition with arbitrary data
    Eigen::VectorXd z(12);
    for (int i = 0; i < 12; ++i)
        z[i] = std::sin(1.0 + i);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(total.size());
    for (int i = 0; i < 12; ++i)
        sum += z[i] * ls[static_cast<std::size_t>(i)].coefficients();
    CHECK((sum - interpolate(sys, z).coefficients()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK_THROWS_AS(lagrangian_spline(sys, 12), ArgumentError);
}

TEST_CASE("doubling the truncation band barely moves the spline")
{
    const auto M = ManifoldSpec::of(Kind::Circle);
    const Lattice L = generate_lattice(M, 0.5, 4);
    Rng rng(6);
    const auto low = enumerate_basis(M, 4.0);
    const SpectralFunction f = random_function(low, 4.0, rng);
    // k = 1 coefficients decay like n^-4, so the tail needs a wide band
    const double band = 1e6;
    for (int k : {1, 2, 4}) {
        const SplineSystem a = build_spline_system(L, k, band);
        const SplineSystem b = build_spline_system(L, k, 2.0 * band);
        const SpectralFunction sa = interpolate(a, node_values(a, f));
        const SpectralFunction sb = interpolate(b, node_values(b, f));
        double diff = 0, size = 0;
        for (int i = 0; i < 500; ++i) {
            const Point x = circle_point(2.0 * pi * i / 500);
            diff = std::max(diff, std::abs(sa(x) - sb(x)));
            size = std::max(size, std::abs(sb(x)));
        }
        CHECK(diff <= 1e-8 * size);
    }
}

TEST_CASE("dependent nodes are reported")
{
    const Lattice L = circle_nodes({0.5, 1.5, 0.5}, 1.0);
    try {
        build_spline_system(L, 1, 400.0);
        FAIL("expected a rank failure");
    } catch (const RankError& e) {
        const std::string w = e.what();
        CHECK(w.find("dependent nodes") != std::string::npos);
    }
    CHECK_THROWS_AS(build_spline_system(uniform_circle(40), 1, 25.0), ArgumentError);
    CHECK_THROWS_AS(build_spline_system(uniform_circle(4), 0, 25.0), ArgumentError);
}

TEST_CASE("spline reconstruction converges with k")
{
    const auto M = ManifoldSpec::of(Kind::Circle);
    Rng rng(9);
    const auto b = enumerate_basis(M, 1.0);
    const SpectralFunction f = random_function(b, 1.0, rng);
    const SplineTable fine = spline_reconstruct(f, generate_lattice(M, 0.3, 1), spline_orders(M, 3));
    const SplineTable coarse = spline_reconstruct(f, generate_lattice(M, 0.6, 1), spline_orders(M, 3));
    CHECK(fine.monotone);
    CHECK(fine.rows.back().sup_error <= 1e-2 * fine.rows.front().sup_error);
    CHECK(fine.rows[2].sup_error <= 0.1 * fine.rows[0].sup_error);
    for (const auto& r : fine.rows)
        CHECK(r.residual <= 1e-9);
    for (std::size_t i = 0; i < fine.rows.size(); ++i)
        if (coarse.rows[i].sup_error > coarse.floor)
            CHECK(fine.rows[i].sup_error < coarse.rows[i].sup_error);
    CHECK(fine.fitted_rate > 0.0);
    CHECK(fine.fitted_rate < 1.0);

    // a constant is reproduced at every order
    Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
    c[0] = 1.0;
    const SplineTable flat = spline_reconstruct(SpectralFunction(b, c), generate_lattice(M, 0.3, 1), {1, 2});
    for (const auto& r : flat.rows)
        CHECK(r.sup_error <= 1e-12);
}

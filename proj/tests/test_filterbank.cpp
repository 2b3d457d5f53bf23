#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mf/errors.hpp"
#include "mf/filterbank.hpp"
#include "mf/rng.hpp"

#include <cmath>
#include <numbers>

using namespace mf;
using std::numbers::pi;

TEST_CASE("cutoff plateaus, support and monotonicity")
{
    const auto fb = make_filter();
    CHECK(fb.psi(1.0 / 8) == 1.0);
    CHECK(fb.psi(0.25) == 1.0);
    CHECK(fb.psi(4.0) == 0.0);
    CHECK(fb.psi(8.0) == 0.0);
    double prev = 1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double s = 5.0 * i / 4000;
        const double v = fb.psi(s);
        CHECK(v <= prev);
        CHECK(v >= 0.0);
        prev = v;
    }
    for (double s : {0.0, 0.1, 0.25, 16.0, 20.0})
        CHECK(fb.phi(s) == 0.0);
    CHECK(fb.phi(1.0) > 0.0);
    CHECK(fb.phi(15.0) > 0.0);
}

TEST_CASE("partition of unity on a log grid")
{
    const auto fb = make_filter();
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const double s = std::exp2(-8.0 + 20.0 * i / 9999.0);
        double acc = 0;
        for (int j = -10; j <= 12; ++j)
            acc += fb.phi_sq_at(j, s);
        worst = std::max(worst, std::abs(acc - 1));
    }
    CHECK(worst <= 1e-12);
    // at s = 1 the three neighbouring scales telescope
    const double s1 = fb.phi_sq_at(-1, 1) + fb.phi_sq_at(0, 1) + fb.phi_sq_at(1, 1);
    CHECK(s1 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("scale ranges")
{
    const auto fb = make_filter();
    CHECK(fb.scales_for(1, 1024).j_min == -1);
    CHECK(fb.scales_for(1, 1024).j_max == 5);
    CHECK(fb.scales_for(2, 256).j_min == -1);
    CHECK(fb.scales_for(2, 256).j_max == 4);
    for (double lambda : {1.0, 2.0, 3.0, 100.0, 1000.0}) {
        const auto r = fb.scales_for(1, 1000);
        double acc = 0;
        for (int j = r.j_min; j <= r.j_max; ++j)
            acc += fb.phi_sq_at(j, lambda);
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("energy identity of the band decomposition")
{
    const auto fb = make_filter();
    Rng rng(2);
    for (Kind k : {Kind::Circle, Kind::Torus2, Kind::Sphere2, Kind::IntervalDirichlet}) {
        auto b = enumerate_basis(ManifoldSpec::of(k), 1000);
        for (int t = 0; t < 20; ++t) {
            auto f = random_function(b, 1000, rng);
            double sum = 0;
            for (const auto& c : band_decompose(f, fb)) {
                sum += c.g.squared_norm();
                CHECK(c.g.band() <= scale_band_hi(c.j));
                for (std::size_t m = 0; m < b->size(); ++m)
                    if (c.g.coefficient(m) != 0.0)
                        CHECK(b->eigenvalue(m) > scale_band_lo(c.j));
            }
            CHECK(std::abs(sum - f.without_kernel().squared_norm()) / f.squared_norm() <= 1e-12);
        }
    }
    auto c = enumerate_basis(ManifoldSpec::of(Kind::Circle), 100);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c->size()));
    e[0] = 3.0;
    for (const auto& g : band_decompose(SpectralFunction(c, e), fb))
        CHECK(g.g.norm() == 0.0);
    e.setZero();
    e[1] = 2.0; // lambda = 1
    int nonzero = 0;
    double sum = 0;
    for (const auto& g : band_decompose(SpectralFunction(c, e), fb)) {
        nonzero += g.g.norm() > 0;
        sum += g.g.squared_norm();
    }
    CHECK(nonzero <= 3);
    CHECK(sum == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("self-adjointness in coefficient space")
{
    const auto fb = make_filter();
    auto b = enumerate_basis(ManifoldSpec::of(Kind::Sphere2), 300);
    Rng rng(4);
    auto f = random_function(b, 300, rng);
    auto th = delta_projection(b, sphere_point(1, 2, 3), 300, 0.1);
    for (int j = -1; j <= 4; ++j) {
        const auto F = fb.multiplier(j);
        CHECK(inner(apply_multiplier(F, 1, f), th) == doctest::Approx(inner(f, apply_multiplier(F, 1, th))).epsilon(1e-13));
    }
}

namespace {

Frame small_frame(Kind k, double c0, double band, int jmin, int jmax, std::uint64_t seed = 1)
{
    FrameOptions o;
    o.c0 = c0;
    o.band = band;
    o.j_min = jmin;
    o.j_max = jmax;
    return build_frame(ManifoldSpec::of(k), make_filter(), o, seed);
}

} // namespace

TEST_CASE("frame atoms")
{
    auto fr = small_frame(Kind::Sphere2, 3.5, 64, -1, 2);
    for (std::size_t i = 0; i < fr.atom_count(); i += 17) {
        const FrameAtom a = fr.atom(i);
        for (std::size_t m = 0; m < fr.basis->size(); ++m) {
            const double lam = fr.basis->eigenvalue(m);
            const double expect = lam <= std::min(a.band_hi, 64.0)
                                      ? fr.filter.phi_at(a.j, lam) * std::sqrt(a.mu) * eval_mode(*fr.basis, m, a.center)
                                      : 0.0;
            CHECK(std::abs(a.rep.coefficient(m) - expect) <= 1e-13);
            if (lam <= a.band_lo || lam >= a.band_hi)
                CHECK(a.rep.coefficient(m) == 0.0);
        }
    }
    // the self inner product sits on the diagonal of the analysis
    const FrameAtom a = fr.atom(5);
    const Eigen::VectorXd coef = frame_analysis(a.rep, fr);
    CHECK(coef[5] == doctest::Approx(a.rep.squared_norm()).epsilon(1e-14));
}

TEST_CASE("lattice counts per scale on the circle grow like 2^j")
{
    auto fr = small_frame(Kind::Circle, 3.3, 4096, 1, 4);
    for (std::size_t i = 1; i < fr.scales.size(); ++i) {
        const double r = static_cast<double>(fr.scales[i].lattice.size()) / static_cast<double>(fr.scales[i - 1].lattice.size());
        CHECK(r >= 1.0);
        CHECK(r <= 4.0);
    }
}

TEST_CASE("frame sandwich and dual reconstruction")
{
    Rng rng(8);
    for (Kind k : {Kind::Circle, Kind::Sphere2}) {
        const double band = k == Kind::Circle ? 400 : 110;
        const auto r = make_filter().scales_for(first_positive_eigenvalue(ManifoldSpec::of(k)), band);
        auto fr = small_frame(k, 3.5, band, r.j_min, r.j_max);
        for (int t = 0; t < 20; ++t) {
            auto f = random_function(fr.basis, band, rng);
            const Eigen::VectorXd a = frame_analysis(f, fr);
            const double ratio = a.squaredNorm() / f.without_kernel().squared_norm();
            CHECK(ratio >= 0.5);
            CHECK(ratio <= 1 + 1e-10);
            CHECK(ratio >= fr.lower_bound() * (1 - 1e-12));
            auto g = frame_reconstruct(a, fr).f;
            CHECK((g - f.without_kernel()).norm() / f.without_kernel().norm() <= 1e-7);
            CHECK(g.coefficient(0) == doctest::Approx(0.0).scale(1e-12));
        }
        // kernel functions analyse to zero; linearity of the round trip
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fr.basis->size()));
        e[0] = 1;
        CHECK(frame_analysis(SpectralFunction(fr.basis, e), fr).norm() == 0.0);
        CHECK(frame_reconstruct(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fr.atom_count())), fr).f.norm() == 0.0);
        auto f = random_function(fr.basis, band, rng, true), g = random_function(fr.basis, band, rng, true);
        auto lhs = frame_reconstruct(frame_analysis(2.0 * f + (-3.0) * g, fr), fr).f;
        auto rhs = 2.0 * frame_reconstruct(frame_analysis(f, fr), fr).f + (-3.0) * frame_reconstruct(frame_analysis(g, fr), fr).f;
        CHECK((lhs - rhs).norm() <= 1e-8 * lhs.norm());
    }
}

TEST_CASE("coverage errors name the missing scales")
{
    auto fr = small_frame(Kind::Circle, 3.5, 400, 1, 2);
    Rng rng(1);
    auto f = random_function(fr.basis, 400, rng);
    try {
        frame_analysis(f, fr);
        FAIL("expected a coverage error");
    } catch (const TruncationError& e) {
        CHECK(std::string(e.what()).find("-1, 0") != std::string::npos);
    }
    CHECK_THROWS_AS(build_frame(ManifoldSpec::of(Kind::Circle), make_filter(), FrameOptions{}, 1), CalibrationError);
}

TEST_CASE("localization of single atoms")
{
    const auto fb = make_filter();
    for (Kind k : {Kind::Circle, Kind::Sphere2}) {
        const auto M = ManifoldSpec::of(k);
        const int j = 4;
        auto b = enumerate_basis(M, scale_band_hi(j));
        const Point c = k == Kind::Circle ? circle_point(2.0) : sphere_point(0.4, -0.3, 0.8);
        auto atom = make_atom(b, fb, j, c, 1.0, scale_band_hi(j));
        auto probes = radial_probes(M, c, pi, 2001);
        auto rep = localization_profile(atom, j, c, probes);
        CHECK(rep.exponent >= 3.0);
        CHECK(rep.fit_points > 100);
        CHECK(rep.scaled_value[0] == *std::max_element(rep.scaled_value.begin(), rep.scaled_value.end()));
        if (k == Kind::Circle) {
            double e4 = 0, e8 = 0;
            for (std::size_t i = 0; i < probes.size(); ++i) {
                if (rep.scaled_distance[i] >= 4)
                    e4 = std::max(e4, rep.scaled_value[i]);
                if (rep.scaled_distance[i] >= 8)
                    e8 = std::max(e8, rep.scaled_value[i]);
            }
            CHECK(e4 / e8 >= 8.0);
        }
    }
    // zonal oracle on the sphere: sum_l Phi(4^-j l(l+1)) (2l+1)/(4 pi) P_l(cos d)
    const int j = 2;
    auto b = enumerate_basis(ManifoldSpec::of(Kind::Sphere2), scale_band_hi(j));
    const Point c = sphere_point(0, 0, 1);
    auto atom = make_atom(b, fb, j, c, 1.0, scale_band_hi(j));
    for (double d : {0.0, 0.3, 1.1, 2.5, pi}) {
        const double x = std::cos(d);
        double p0 = 1, p1 = x, acc = fb.phi_at(j, 0) / (4 * pi) + fb.phi_at(j, 2) * 3 / (4 * pi) * x;
        for (int l = 2; l * (l + 1) <= scale_band_hi(j); ++l) {
            const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
            acc += fb.phi_at(j, l * (l + 1.0)) * (2 * l + 1) / (4 * pi) * p2;
            p0 = p1;
            p1 = p2;
        }
        CHECK(atom(sphere_point_polar(d, 0.7)) == doctest::Approx(acc).epsilon(1e-12).scale(1e-12));
    }
    // far field at the antipode for j = 5
    auto b5 = enumerate_basis(ManifoldSpec::of(Kind::Sphere2), scale_band_hi(5));
    const Point x = sphere_point(0.3, 0.2, 0.9);
    auto a5 = make_atom(b5, fb, 5, x, 1.0, scale_band_hi(5));
    CHECK(std::abs(a5(sphere_point(-0.3, -0.2, -0.9))) <= 1e-6 * std::abs(a5(x)));
}

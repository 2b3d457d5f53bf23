#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mf/errors.hpp"
#include "mf/lattice.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace mf;
using std::numbers::pi;

namespace {

double brute_min_distance(const std::vector<Point>& pts)
{
    double d = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::min(d, geodesic_distance(pts[i], pts[j]));
    return d;
}

} // namespace

TEST_CASE("index queries agree with brute force")
{
    for (Kind k : {Kind::Circle, Kind::Torus2, Kind::Sphere2, Kind::IntervalDirichlet}) {
        const auto M = ManifoldSpec::of(k);
        auto pool = candidate_pool(M, 0.8);
        PointIndex idx(k, 0.3);
        for (const auto& p : pool)
            idx.insert(p);
        auto probes = probe_grid(M, 0.37);
        for (std::size_t q = 0; q < probes.size(); q += 7) {
            std::size_t brute = 0;
            double best = INFINITY;
            for (const auto& p : pool) {
                const double d = geodesic_distance(probes[q], p);
                brute += d <= 0.5;
                best = std::min(best, d);
            }
            std::size_t hits = 0;
            idx.for_each_within(probes[q], 0.5, [&](std::size_t, double) { ++hits; });
            CHECK(hits == brute);
            CHECK(idx.nearest(probes[q]).distance == best);
        }
    }
}

TEST_CASE("uniform circle lattice")
{
    const auto M = ManifoldSpec::of(Kind::Circle);
    const double rho = 2 * pi / 8;
    std::vector<Point> pts;
    for (int i = 0; i < 8; ++i)
        pts.push_back(circle_point(2 * pi * i / 8 + 0.1));
    auto rep = validate_lattice(M, pts, rho);
    CHECK(rep.separated);
    CHECK(rep.covering);
    CHECK(rep.measured.multiplicity == 2);
    CHECK(rep.probe_spacing <= rho / 20);

    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
        auto L = generate_lattice(M, rho, seed);
        REQUIRE(L.size() == 8);
        std::vector<double> a;
        for (const auto& p : L.points)
            a.push_back(p.c[0]);
        std::sort(a.begin(), a.end());
        for (std::size_t i = 1; i < 8; ++i)
            CHECK(a[i] - a[i - 1] == doctest::Approx(2 * pi / 8).epsilon(1e-12));
    }
}

TEST_CASE("degenerate configurations")
{
    auto rep = validate_lattice(ManifoldSpec::of(Kind::Circle), {circle_point(1.0), circle_point(1.0)}, 0.5);
    CHECK_FALSE(rep.separated);
    auto one = validate_lattice(ManifoldSpec::of(Kind::Sphere2), {sphere_point(0, 0, 1)}, 10.0);
    CHECK(one.covering);
    CHECK(one.separated);
    auto L = generate_lattice(ManifoldSpec::of(Kind::Sphere2), 10.0, 3);
    CHECK(L.size() == 1);
}

TEST_CASE("generated lattices satisfy the lattice properties")
{
    struct Case
    {
        Kind kind;
        double rho;
    };
    for (auto [k, rho] : {Case{Kind::IntervalDirichlet, pi / 4}, Case{Kind::Circle, 0.1}, Case{Kind::Torus2, 0.4},
                          Case{Kind::Sphere2, 0.5}, Case{Kind::Sphere2, 0.21}}) {
        const auto M = ManifoldSpec::of(k);
        auto L = generate_lattice(M, rho, 42);
        CHECK(brute_min_distance(L.points) > rho / 2);
        CHECK(brute_min_distance(L.points) == L.measured.min_distance);
        auto rep = validate_lattice(M, L.points, rho);
        CHECK(rep.ok());
        CHECK(rep.measured.multiplicity >= 1);
        if (k == Kind::IntervalDirichlet)
            CHECK(L.size() >= 4);
        if (k == Kind::Sphere2 && rho == 0.5) {
            const double ref = 4 * pi / (rho * rho);
            CHECK(L.size() >= ref / 3);
            CHECK(L.size() <= ref * 3);
        }
    }
}

TEST_CASE("determinism and seeds")
{
    const auto M = ManifoldSpec::of(Kind::Sphere2);
    auto a = generate_lattice(M, 0.3, 7);
    auto b = generate_lattice(M, 0.3, 7);
    auto c = generate_lattice(M, 0.3, 8);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
}

TEST_CASE("cardinality scales like rho^-d")
{
    for (Kind k : {Kind::Circle, Kind::Torus2, Kind::Sphere2, Kind::IntervalDirichlet}) {
        const auto M = ManifoldSpec::of(k);
        std::vector<double> s;
        for (double rho : {0.4, 0.2, 0.1}) {
            auto L = generate_lattice(M, rho, 1);
            s.push_back(static_cast<double>(L.size()) * std::pow(rho, M.dim));
        }
        const double lo = *std::min_element(s.begin(), s.end()), hi = *std::max_element(s.begin(), s.end());
        CHECK(hi / lo <= 2.0);
    }
}

TEST_CASE("CSV round trip is exact")
{
    for (Kind k : {Kind::Circle, Kind::Torus2, Kind::Sphere2, Kind::IntervalDirichlet}) {
        auto L = generate_lattice(ManifoldSpec::of(k), 0.5, 5);
        std::stringstream ss;
        write_lattice_csv(ss, L);
        CHECK(read_points_csv(ss, k) == L.points);
    }
}

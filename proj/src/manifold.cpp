#include "mf/manifold.hpp"

#include "mf/errors.hpp"

#include <cmath>
#include <numbers>

namespace mf {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace

ManifoldSpec ManifoldSpec::of(Kind kind)
{
    switch (kind) {
    case Kind::Circle:
        return {kind, 1, two_pi, 1, true};
    case Kind::Torus2:
        return {kind, 2, two_pi * two_pi, 2, true};
    case Kind::Sphere2:
        return {kind, 2, 4.0 * pi, 3, true};
    case Kind::IntervalDirichlet:
        return {kind, 1, pi, std::nullopt, false};
    }
    throw ArgumentError("unknown manifold kind");
}

ManifoldSpec ManifoldSpec::parse(std::string_view name)
{
    if (name == "circle" || name == "s1")
        return of(Kind::Circle);
    if (name == "torus2" || name == "torus" || name == "t2")
        return of(Kind::Torus2);
    if (name == "sphere2" || name == "sphere" || name == "s2")
        return of(Kind::Sphere2);
    if (name == "interval" || name == "interval-dirichlet" || name == "interval_dirichlet")
        return of(Kind::IntervalDirichlet);
    throw ArgumentError("unknown manifold '" + std::string(name) +
                        "' (expected circle, torus2, sphere2 or interval)");
}

std::string ManifoldSpec::name() const
{
    switch (kind) {
    case Kind::Circle:
        return "circle";
    case Kind::Torus2:
        return "torus2";
    case Kind::Sphere2:
        return "sphere2";
    case Kind::IntervalDirichlet:
        return "interval";
    }
    return "?";
}

double ManifoldSpec::diameter() const
{
    switch (kind) {
    case Kind::Circle:
    case Kind::Sphere2:
    case Kind::IntervalDirichlet:
        return pi;
    case Kind::Torus2:
        return std::sqrt(2.0) * pi;
    }
    return pi;
}

double wrap_angle(double theta)
{
    double t = std::fmod(theta, two_pi);
    if (t < 0.0)
        t += two_pi;
    if (t >= two_pi)
        t = 0.0;
    return t;
}

Point circle_point(double theta)
{
    return {Kind::Circle, {wrap_angle(theta), 0.0, 0.0}};
}

Point torus_point(double theta1, double theta2)
{
    return {Kind::Torus2, {wrap_angle(theta1), wrap_angle(theta2), 0.0}};
}

Point sphere_point(double x, double y, double z)
{
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n))
        throw ArgumentError("sphere point must be a nonzero finite vector");
    if (std::abs(n - 1.0) <= 2e-16)
        return {Kind::Sphere2, {x, y, z}}; // already unit length; keeps coordinates bitwise
    return {Kind::Sphere2, {x / n, y / n, z / n}};
}

Point sphere_point_polar(double colatitude, double longitude)
{
    const double s = std::sin(colatitude);
    return sphere_point(s * std::cos(longitude), s * std::sin(longitude), std::cos(colatitude));
}

Point interval_point(double x)
{
    if (!(x >= 0.0 && x <= pi))
        throw ArgumentError("interval point must lie in [0, pi]");
    return {Kind::IntervalDirichlet, {x, 0.0, 0.0}};
}

Point make_point(Kind kind, const std::array<double, 3>& raw)
{
    switch (kind) {
    case Kind::Circle:
        return circle_point(raw[0]);
    case Kind::Torus2:
        return torus_point(raw[0], raw[1]);
    case Kind::Sphere2:
        return sphere_point(raw[0], raw[1], raw[2]);
    case Kind::IntervalDirichlet:
        return interval_point(raw[0]);
    }
    throw ArgumentError("unknown manifold kind");
}

int coordinate_count(Kind kind)
{
    switch (kind) {
    case Kind::Circle:
    case Kind::IntervalDirichlet:
        return 1;
    case Kind::Torus2:
        return 2;
    case Kind::Sphere2:
        return 3;
    }
    return 1;
}

namespace {
double circle_gap(double a, double b)
{
    const double d = std::abs(a - b);
    return std::min(d, two_pi - d);
}
} // namespace

double geodesic_distance(const Point& x, const Point& y)
{
    switch (x.kind) {
    case Kind::Circle:
        return circle_gap(x.c[0], y.c[0]);
    case Kind::Torus2: {
        const double a = circle_gap(x.c[0], y.c[0]);
        const double b = circle_gap(x.c[1], y.c[1]);
        return std::sqrt(a * a + b * b);
    }
    case Kind::Sphere2: {
        // atan2 form: same angle as acos(clamp(dot)) but accurate near 0 and pi.
        const double dot = x.c[0] * y.c[0] + x.c[1] * y.c[1] + x.c[2] * y.c[2];
        const double cx = x.c[1] * y.c[2] - x.c[2] * y.c[1];
        const double cy = x.c[2] * y.c[0] - x.c[0] * y.c[2];
        const double cz = x.c[0] * y.c[1] - x.c[1] * y.c[0];
        return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    }
    case Kind::IntervalDirichlet:
        return std::abs(x.c[0] - y.c[0]);
    }
    return 0.0;
}

} // namespace mf

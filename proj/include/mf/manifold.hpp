#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace mf {

enum class Kind
{
    Circle,
    Torus2,
    Sphere2,
    IntervalDirichlet
};

/// Static description of one of the built-in manifolds.
struct ManifoldSpec
{
    Kind kind;
    int dim;                      // intrinsic dimension d
    double volume;                // total Riemannian measure
    std::optional<int> group_dim; // m = dim G for the homogeneous kinds
    bool has_zero_mode;           // constants are eigenfunctions (closed manifolds)

    static ManifoldSpec of(Kind kind);
    static ManifoldSpec parse(std::string_view name);

    bool homogeneous() const { return group_dim.has_value(); }
    std::string name() const;

    /// Diameter in the geodesic metric.
    double diameter() const;
};

/// A point on a manifold. Coordinates depend on the kind:
///   Circle            c[0] = angle in [0, 2pi)
///   Torus2            c[0], c[1] = angles in [0, 2pi)
///   Sphere2           c = unit vector (x, y, z)
///   IntervalDirichlet c[0] = x in [0, pi]
/// Use the factory functions; they canonicalize angles and normalize sphere points.
struct Point
{
    Kind kind = Kind::Circle;
    std::array<double, 3> c{0.0, 0.0, 0.0};

    friend bool operator==(const Point&, const Point&) = default;
};

double wrap_angle(double theta);

Point circle_point(double theta);
Point torus_point(double theta1, double theta2);
Point sphere_point(double x, double y, double z);
/// Sphere point from colatitude and longitude.
Point sphere_point_polar(double colatitude, double longitude);
Point interval_point(double x);

/// Build a point from raw coordinates (as read from CSV), canonicalizing.
Point make_point(Kind kind, const std::array<double, 3>& raw);

/// Number of coordinates used by the point representation of `kind`.
int coordinate_count(Kind kind);

/// Riemannian (geodesic) distance.
double geodesic_distance(const Point& x, const Point& y);

} // namespace mf

#pragma once

#include "mf/manifold.hpp"

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mf {

/// Bucket grid over a manifold for radius and nearest-neighbour queries in the
/// geodesic metric. Circle/Torus2/Interval bucket the angle coordinates;
/// Sphere2 buckets the embedding in R^3 (chordal distance is monotone in the
/// geodesic one). Queries are safe to run concurrently; insert is not.
class PointIndex
{
  public:
    PointIndex(Kind kind, double cell);

    std::size_t size() const { return points_.size(); }
    const Point& point(std::size_t i) const { return points_[i]; }
    const std::vector<Point>& points() const { return points_; }

    /// Appends a point; its index is the previous size().
    std::size_t insert(const Point& p);

    /// Calls fn(index, distance) for every stored point with distance <= r.
    template <class Fn>
    void for_each_within(const Point& x, double r, Fn&& fn) const;

    struct Hit
    {
        std::ptrdiff_t index = -1;
        double distance = 0.0;
    };
    /// Nearest stored point (smallest index on ties); index -1 when empty.
    Hit nearest(const Point& x) const;

  private:
    struct Span
    {
        long lo, hi; // inclusive, before wrapping
    };
    std::array<long, 3> cell_of(const Point& p) const;
    std::size_t flat(long i, long j, long k) const
    {
        return static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k);
    }
    std::array<Span, 3> spans(const Point& x, double r) const;

    Kind kind_;
    bool periodic_;
    double cell_;
    std::array<long, 3> dims_{1, 1, 1}; // cell counts per coordinate (periodic axes wrap)
    std::vector<Point> points_;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

template <class Fn>
void PointIndex::for_each_within(const Point& x, double r, Fn&& fn) const
{
    const auto sp = spans(x, r);
    // squared chordal prefilter on the sphere
    const double ch = 2.0 * std::sin(std::min(r, 3.141592653589793) / 2.0);
    const double ch2 = ch * ch * (1.0 + 1e-12) + 1e-300;
    auto wrap = [](long i, long n) { return ((i % n) + n) % n; };
    for (long a = sp[0].lo; a <= sp[0].hi; ++a)
        for (long b = sp[1].lo; b <= sp[1].hi; ++b)
            for (long c = sp[2].lo; c <= sp[2].hi; ++c) {
                const auto& bucket = periodic_ ? buckets_[flat(wrap(a, dims_[0]), wrap(b, dims_[1]), 0)]
                                               : buckets_[flat(a, b, c)];
                for (std::uint32_t i : bucket) {
                    const Point& p = points_[i];
                    if (kind_ == Kind::Sphere2) {
                        const double dx = p.c[0] - x.c[0], dy = p.c[1] - x.c[1], dz = p.c[2] - x.c[2];
                        if (dx * dx + dy * dy + dz * dz > ch2)
                            continue;
                    }
                    const double d = geodesic_distance(x, p);
                    if (d <= r)
                        fn(static_cast<std::size_t>(i), d);
                }
            }
}

struct LatticeMeasure
{
    double min_distance = 0.0;    // min pairwise geodesic distance (inf for one point)
    double covering_radius = 0.0; // max over probes of the distance to the nearest point
    int multiplicity = 0;         // max over probes of #{points at distance < rho}
};

/// A rho-lattice: points whose rho/4-balls are disjoint and whose rho/2-balls
/// cover the manifold, with measured geometry.
struct Lattice
{
    ManifoldSpec manifold;
    std::vector<Point> points;
    double rho = 0.0;
    LatticeMeasure measured;

    std::size_t size() const { return points.size(); }
};

struct LatticeReport
{
    bool separated = false;    // min pairwise distance > rho/2
    bool covering = false;     // covering radius <= rho/2 on the probe grid
    double probe_spacing = 0;  // spacing of the probe grid (<= rho/20)
    double covering_tolerance = 0; // relative slack accepted on the covering radius
    std::size_t probes = 0;
    LatticeMeasure measured;

    bool ok() const { return separated && covering; }
};

/// Probe points with spacing <= `spacing` along every coordinate direction.
std::vector<Point> probe_grid(const ManifoldSpec& manifold, double spacing);

/// Candidate pool for lattice generation: uniform grids with spacing rho/40 (1-D)
/// or rho/10 (2-D), Fibonacci points on the sphere.
std::vector<Point> candidate_pool(const ManifoldSpec& manifold, double rho);

LatticeReport validate_lattice(const ManifoldSpec& manifold, const std::vector<Point>& points, double rho);

/// Greedy farthest-point selection from the candidate pool, started at a
/// seed-determined pool index and stopped once the pool is covered by
/// rho/2-balls; probe points still uncovered are then added. Throws
/// ValidationError naming the violated property if the result is not a lattice.
Lattice generate_lattice(const ManifoldSpec& manifold, double rho, std::uint64_t seed);

/// CSV with one point per row (coordinates as in Point).
void write_lattice_csv(std::ostream& os, const Lattice& lattice);
std::vector<Point> read_points_csv(std::istream& is, Kind kind);

} // namespace mf

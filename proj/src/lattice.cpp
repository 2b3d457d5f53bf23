#include "mf/lattice.hpp"

#include "mf/errors.hpp"
#include "mf/format.hpp"
#include "mf/parallel.hpp"
#include "mf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>

namespace mf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double rel_slack = 1e-9;

bool periodic(Kind k) { return k == Kind::Circle || k == Kind::Torus2; }

int axes(Kind k)
{
    switch (k) {
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

double extent(Kind k)
{
    switch (k) {
    case Kind::Circle:
    case Kind::Torus2:
        return two_pi;
    case Kind::IntervalDirichlet:
        return std::numbers::pi;
    case Kind::Sphere2:
        return 2.0;
    }
    return 1.0;
}

double chord(double r) { return 2.0 * std::sin(std::min(r, std::numbers::pi) / 2.0); }

} // namespace

PointIndex::PointIndex(Kind kind, double cell) : kind_(kind), periodic_(periodic(kind))
{
    if (!(cell > 0.0))
        throw ArgumentError("PointIndex cell size must be positive");
    const double w = kind == Kind::Sphere2 ? chord(cell) : cell;
    const long cap = kind == Kind::Sphere2 ? 200 : kind == Kind::Torus2 ? 2000 : (1L << 20);
    const long n = std::clamp<long>(static_cast<long>(std::floor(extent(kind) / w)), 1, cap);
    cell_ = extent(kind) / static_cast<double>(n);
    for (int a = 0; a < axes(kind); ++a)
        dims_[static_cast<std::size_t>(a)] = n;
    buckets_.resize(static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]));
}

std::array<long, 3> PointIndex::cell_of(const Point& p) const
{
    std::array<long, 3> c{0, 0, 0};
    const double origin = kind_ == Kind::Sphere2 ? -1.0 : 0.0;
    for (int a = 0; a < axes(kind_); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const long i = static_cast<long>(std::floor((p.c[ua] - origin) / cell_));
        c[ua] = std::clamp<long>(i, 0, dims_[ua] - 1);
    }
    return c;
}

std::array<PointIndex::Span, 3> PointIndex::spans(const Point& x, double r) const
{
    const double reach = std::min(kind_ == Kind::Sphere2 ? chord(r) : r, extent(kind_));
    const auto centre = cell_of(x);
    std::array<Span, 3> out{Span{0, 0}, Span{0, 0}, Span{0, 0}};
    for (int a = 0; a < axes(kind_); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const long n = dims_[ua];
        const long s = static_cast<long>(std::floor(reach / cell_)) + 1;
        if (periodic_) {
            if (2 * s + 1 >= n)
                out[ua] = {0, n - 1};
            else
                out[ua] = {centre[ua] - s, centre[ua] + s};
        } else {
            out[ua] = {std::max(0L, centre[ua] - s), std::min(n - 1, centre[ua] + s)};
        }
    }
    return out;
}

std::size_t PointIndex::insert(const Point& p)
{
    const std::size_t idx = points_.size();
    points_.push_back(p);
    const auto c = cell_of(p);
    buckets_[flat(c[0], c[1], c[2])].push_back(static_cast<std::uint32_t>(idx));
    return idx;
}

PointIndex::Hit PointIndex::nearest(const Point& x) const
{
    Hit best;
    if (points_.empty())
        return best;
    best.distance = std::numeric_limits<double>::infinity();
    auto take = [&](std::size_t i, double d) {
        const auto si = static_cast<std::ptrdiff_t>(i);
        if (d < best.distance || (d == best.distance && si < best.index)) {
            best.distance = d;
            best.index = si;
        }
    };
    // the first pass touches only the neighbouring cells
    for (double r = cell_ * (1.0 - 1e-9);; r *= 2.0) {
        for_each_within(x, r, take);
        if (best.index >= 0)
            return best;
        if (r > 8.0) {
            for (std::size_t i = 0; i < points_.size(); ++i)
                take(i, geodesic_distance(x, points_[i]));
            return best;
        }
    }
}

std::vector<Point> probe_grid(const ManifoldSpec& manifold, double spacing)
{
    std::vector<Point> out;
    switch (manifold.kind) {
    case Kind::Circle: {
        const auto n = static_cast<long>(std::ceil(two_pi / spacing));
        for (long i = 0; i < n; ++i)
            out.push_back(circle_point(two_pi * static_cast<double>(i) / static_cast<double>(n)));
        break;
    }
    case Kind::Torus2: {
        const auto n = static_cast<long>(std::ceil(two_pi / spacing));
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                out.push_back(torus_point(two_pi * static_cast<double>(i) / static_cast<double>(n),
                                          two_pi * static_cast<double>(j) / static_cast<double>(n)));
        break;
    }
    case Kind::IntervalDirichlet: {
        // interior midpoints: Dirichlet data vanish at the end points
        const auto n = static_cast<long>(std::ceil(std::numbers::pi / spacing));
        for (long i = 0; i < n; ++i)
            out.push_back(interval_point(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n)));
        break;
    }
    case Kind::Sphere2: {
        const auto rings = static_cast<long>(std::ceil(std::numbers::pi / spacing));
        const double dt = std::numbers::pi / static_cast<double>(rings);
        out.push_back(sphere_point(0, 0, 1));
        for (long a = 0; a < rings; ++a) {
            const double t = (static_cast<double>(a) + 0.5) * dt;
            const auto n = std::max(1L, static_cast<long>(std::ceil(two_pi * std::sin(t) / spacing)));
            for (long b = 0; b < n; ++b)
                out.push_back(sphere_point_polar(t, two_pi * static_cast<double>(b) / static_cast<double>(n)));
        }
        out.push_back(sphere_point(0, 0, -1));
        break;
    }
    }
    return out;
}

std::vector<Point> candidate_pool(const ManifoldSpec& manifold, double rho)
{
    std::vector<Point> out;
    switch (manifold.kind) {
    case Kind::Circle: {
        const auto n = std::max(64L, static_cast<long>(std::ceil(40.0 * two_pi / rho)));
        for (long i = 0; i < n; ++i)
            out.push_back(circle_point(two_pi * static_cast<double>(i) / static_cast<double>(n)));
        break;
    }
    case Kind::Torus2: {
        const auto n = std::max(16L, static_cast<long>(std::ceil(10.0 * two_pi / rho)));
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                out.push_back(torus_point(two_pi * static_cast<double>(i) / static_cast<double>(n),
                                          two_pi * static_cast<double>(j) / static_cast<double>(n)));
        break;
    }
    case Kind::IntervalDirichlet: {
        const auto n = std::max(64L, static_cast<long>(std::ceil(40.0 * std::numbers::pi / rho)));
        for (long i = 0; i < n; ++i)
            out.push_back(interval_point(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n)));
        break;
    }
    case Kind::Sphere2: {
        const double h = rho / 10.0;
        const auto n = std::max(64L, static_cast<long>(std::ceil(4.0 * std::numbers::pi / (h * h))));
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (long i = 0; i < n; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i);
            out.push_back(sphere_point(r * std::cos(phi), r * std::sin(phi), z));
        }
        break;
    }
    }
    return out;
}

namespace {

LatticeReport validate_with(const std::vector<Point>& points, double rho, const std::vector<Point>& probes,
                            double probe_spacing, Kind kind)
{
    LatticeReport rep;
    rep.probe_spacing = probe_spacing;
    rep.covering_tolerance = rel_slack;
    rep.probes = probes.size();
    if (points.empty()) {
        rep.measured.covering_radius = std::numeric_limits<double>::infinity();
        rep.measured.min_distance = std::numeric_limits<double>::infinity();
        rep.separated = true;
        return rep;
    }
    PointIndex idx(kind, rho / 2.0);
    for (const auto& p : points)
        idx.insert(p);

    // property 1
    std::vector<double> near(points.size(), std::numeric_limits<double>::infinity());
    parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            idx.for_each_within(points[i], rho, [&](std::size_t j, double d) {
                if (j != i)
                    near[i] = std::min(near[i], d);
            });
    });
    double dmin = *std::min_element(near.begin(), near.end());
    if (!std::isfinite(dmin) && points.size() > 1) {
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                dmin = std::min(dmin, geodesic_distance(points[i], points[j]));
    }
    rep.measured.min_distance = dmin;
    rep.separated = dmin > rho / 2.0;

    // properties 2 and 3 on the probes
    std::vector<double> cover(probes.size());
    std::vector<int> mult(probes.size());
    const double open = rho * (1.0 - rel_slack);
    parallel_for(probes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            int c = 0;
            double dn = std::numeric_limits<double>::infinity();
            idx.for_each_within(probes[i], rho, [&](std::size_t, double d) {
                c += d < open;
                dn = std::min(dn, d);
            });
            cover[i] = std::isfinite(dn) ? dn : idx.nearest(probes[i]).distance;
            mult[i] = c;
        }
    });
    rep.measured.covering_radius = cover.empty() ? 0.0 : *std::max_element(cover.begin(), cover.end());
    rep.measured.multiplicity = mult.empty() ? 0 : *std::max_element(mult.begin(), mult.end());
    rep.covering = rep.measured.covering_radius <= rho / 2.0 * (1.0 + rel_slack);
    return rep;
}

} // namespace

LatticeReport validate_lattice(const ManifoldSpec& manifold, const std::vector<Point>& points, double rho)
{
    const double spacing = rho / 20.0;
    return validate_with(points, rho, probe_grid(manifold, spacing), spacing, manifold.kind);
}

Lattice generate_lattice(const ManifoldSpec& manifold, double rho, std::uint64_t seed)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw ArgumentError("rho must be positive and finite");
    const std::vector<Point> pool = candidate_pool(manifold, rho);
    const std::size_t n = pool.size();
    if (n > (1u << 31))
        throw ResourceError("candidate pool too large for rho = " + fmt(rho));

    PointIndex pidx(manifold.kind, rho / 2.0);
    for (const auto& p : pool)
        pidx.insert(p);

    const double stop = rho / 2.0 * (1.0 + rel_slack);
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    std::vector<Point> chosen;

    struct Entry
    {
        double d;
        std::size_t i;
        bool operator<(const Entry& o) const { return d < o.d || (d == o.d && i > o.i); }
    };
    std::priority_queue<Entry> heap;

    auto select = [&](std::size_t s, double reach) {
        chosen.push_back(pool[s]);
        d[s] = 0.0;
        pidx.for_each_within(pool[s], reach, [&](std::size_t j, double dist) {
            if (dist < d[j])
                d[j] = dist;
        });
    };

    const std::size_t start = static_cast<std::size_t>(derive_seed(seed, "lattice-start") % n);
    select(start, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0.0)
            heap.push({d[i], i});
    while (!heap.empty()) {
        const Entry top = heap.top();
        heap.pop();
        if (top.d != d[top.i]) {
            if (d[top.i] > 0.0)
                heap.push({d[top.i], top.i});
            continue;
        }
        if (top.d <= stop)
            break;
        select(top.i, top.d);
    }

    // uncovered probes become lattice points; each lies farther than rho/2
    // from every existing point, so separation is kept
    const double spacing = rho / 20.0;
    const std::vector<Point> probes = probe_grid(manifold, spacing);
    PointIndex lidx(manifold.kind, rho / 2.0);
    for (const auto& p : chosen)
        lidx.insert(p);
    for (const auto& q : probes) {
        if (lidx.nearest(q).distance > stop) {
            chosen.push_back(q);
            lidx.insert(q);
        }
    }

    const LatticeReport rep = validate_with(chosen, rho, probes, spacing, manifold.kind);
    if (!rep.separated)
        throw ValidationError("lattice property 1 (rho/4-balls disjoint) violated: min distance " +
                              fmt(rep.measured.min_distance) + " <= rho/2 = " + fmt(rho / 2));
    if (!rep.covering)
        throw ValidationError("lattice property 2 (rho/2-balls cover) violated: covering radius " +
                              fmt(rep.measured.covering_radius) + " > rho/2 = " + fmt(rho / 2));
    return Lattice{manifold, std::move(chosen), rho, rep.measured};
}

void write_lattice_csv(std::ostream& os, const Lattice& lattice)
{
    switch (lattice.manifold.kind) {
    case Kind::Circle:
        os << "k,theta\n";
        break;
    case Kind::Torus2:
        os << "k,theta1,theta2\n";
        break;
    case Kind::Sphere2:
        os << "k,x,y,z\n";
        break;
    case Kind::IntervalDirichlet:
        os << "k,x\n";
        break;
    }
    const int nc = coordinate_count(lattice.manifold.kind);
    for (std::size_t k = 0; k < lattice.points.size(); ++k) {
        os << k;
        for (int a = 0; a < nc; ++a)
            os << ',' << fmt(lattice.points[k].c[static_cast<std::size_t>(a)]);
        os << '\n';
    }
}

std::vector<Point> read_points_csv(std::istream& is, Kind kind)
{
    std::vector<Point> out;
    const int nc = coordinate_count(kind);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-'))
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ','))
            vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != nc + 1)
            throw ArgumentError("lattice CSV row has " + std::to_string(vals.size()) + " fields, expected " +
                                std::to_string(nc + 1));
        std::array<double, 3> raw{0, 0, 0};
        for (int a = 0; a < nc; ++a)
            raw[static_cast<std::size_t>(a)] = vals[static_cast<std::size_t>(a + 1)];
        out.push_back(make_point(kind, raw));
    }
    return out;
}

} // namespace mf

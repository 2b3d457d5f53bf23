#include "mf/spectral.hpp"

#include "mf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mf {

namespace {

constexpr double pi = std::numbers::pi;

int isqrt_floor(double band)
{
    auto k = static_cast<long long>(std::floor(std::sqrt(band)));
    while (k > 0 && static_cast<double>(k * k) > band)
        --k;
    while (static_cast<double>((k + 1) * (k + 1)) <= band)
        ++k;
    return static_cast<int>(k);
}

int sphere_degree(double band)
{
    auto l = static_cast<long long>(std::floor(std::sqrt(band + 0.25) - 0.5));
    if (l < 0)
        l = 0;
    while (l > 0 && static_cast<double>(l * (l + 1)) > band)
        --l;
    while (static_cast<double>((l + 1) * (l + 2)) <= band)
        ++l;
    return static_cast<int>(l);
}

inline std::size_t tri(int l, int m) { return static_cast<std::size_t>(l) * (l + 1) / 2 + m; }

// Values of circle modes 0..2K at angle theta: 1/sqrt(2pi), cos(k.)/sqrt(pi), sin(k.)/sqrt(pi).
void circle_table(double theta, int K, double* out)
{
    static const double c0 = 1.0 / std::sqrt(2.0 * pi);
    static const double ck = 1.0 / std::sqrt(pi);
    out[0] = c0;
    for (int k = 1; k <= K; ++k) {
        const double a = k * theta;
        out[2 * k - 1] = ck * std::cos(a);
        out[2 * k] = ck * std::sin(a);
    }
}

} // namespace

int band_frequency(Kind kind, double band)
{
    if (!(band >= 0.0) || !std::isfinite(band))
        throw ArgumentError("spectral band must be finite and nonnegative");
    if (kind == Kind::Sphere2)
        return sphere_degree(band);
    return isqrt_floor(band);
}

double first_positive_eigenvalue(const ManifoldSpec& manifold)
{
    return manifold.kind == Kind::Sphere2 ? 2.0 : 1.0;
}

SpectralBasis::SpectralBasis(const ManifoldSpec& manifold, double band, std::size_t mode_cap)
  : manifold_(manifold), band_(band)
{
    const int K = band_frequency(manifold.kind, band);
    max_freq_ = K;
    auto check_cap = [&](std::size_t count) {
        if (count > mode_cap) {
            std::ostringstream os;
            os << "basis for band " << band << " on " << manifold.name() << " has " << count
               << " modes, above the cap of " << mode_cap;
            throw ResourceError(os.str());
        }
    };

    switch (manifold.kind) {
    case Kind::Circle: {
        check_cap(2 * static_cast<std::size_t>(K) + 1);
        modes_.push_back({0.0, 0, 0});
        for (int k = 1; k <= K; ++k) {
            modes_.push_back({double(k) * k, k, 1});
            modes_.push_back({double(k) * k, k, 2});
        }
        break;
    }
    case Kind::Torus2: {
        std::size_t count = 0;
        for (int k1 = -K; k1 <= K; ++k1)
            count += 2 * static_cast<std::size_t>(isqrt_floor(band - double(k1) * k1)) + 1;
        check_cap(count);
        modes_.reserve(count);
        const int n = 2 * K + 1;
        for (int i1 = 0; i1 < n; ++i1) {
            const int k1 = circle_mode_frequency(i1);
            for (int i2 = 0; i2 < n; ++i2) {
                const int k2 = circle_mode_frequency(i2);
                const double lam = double(k1) * k1 + double(k2) * k2;
                if (lam <= band)
                    modes_.push_back({lam, i1, i2});
            }
        }
        std::stable_sort(modes_.begin(), modes_.end(), [](const Mode& x, const Mode& y) {
            if (x.lambda != y.lambda)
                return x.lambda < y.lambda;
            if (x.a != y.a)
                return x.a < y.a;
            return x.b < y.b;
        });
        break;
    }
    case Kind::Sphere2: {
        if (K > sphere_degree_cap) {
            std::ostringstream os;
            os << "sphere degree " << K << " exceeds the supported maximum " << sphere_degree_cap;
            throw ResourceError(os.str());
        }
        check_cap(static_cast<std::size_t>(K + 1) * (K + 1));
        for (int l = 0; l <= K; ++l)
            for (int m = -l; m <= l; ++m)
                modes_.push_back({double(l) * (l + 1), l, m});
        rec_a_.assign(tri(K, K) + 1, 0.0);
        rec_b_.assign(tri(K, K) + 1, 0.0);
        for (int l = 2; l <= K; ++l)
            for (int m = 0; m <= l - 2; ++m) {
                const double ll = l, mm = m;
                rec_a_[tri(l, m)] = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
                rec_b_[tri(l, m)] =
                    std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
            }
        break;
    }
    case Kind::IntervalDirichlet: {
        check_cap(static_cast<std::size_t>(K));
        for (int k = 1; k <= K; ++k)
            modes_.push_back({double(k) * k, k, 0});
        break;
    }
    }
}

std::string SpectralBasis::describe(std::size_t m) const
{
    const Mode& md = modes_.at(m);
    auto circ = [](int index, const char* var) {
        std::ostringstream os;
        const int k = circle_mode_frequency(index);
        if (index == 0)
            os << "1";
        else
            os << (index % 2 == 1 ? "cos(" : "sin(") << k << var << ")";
        return os.str();
    };
    std::ostringstream os;
    switch (manifold_.kind) {
    case Kind::Circle:
        os << circ(md.b == 0 ? 0 : circle_mode_index(md.a, md.b == 2), "t");
        break;
    case Kind::Torus2:
        os << circ(md.a, "s") << "*" << circ(md.b, "t");
        break;
    case Kind::Sphere2:
        os << "Y(" << md.a << ";" << md.b << ")";
        break;
    case Kind::IntervalDirichlet:
        os << "sin(" << md.a << "x)";
        break;
    }
    return os.str();
}

std::size_t SpectralBasis::count_upto(double b) const
{
    auto it = std::upper_bound(modes_.begin(), modes_.end(), b,
                               [](double v, const Mode& md) { return v < md.lambda; });
    return static_cast<std::size_t>(it - modes_.begin());
}

std::size_t SpectralBasis::zero_mode_count() const
{
    return (!modes_.empty() && modes_.front().lambda == 0.0) ? 1 : 0;
}

namespace {

// Fully normalized associated Legendre value q_l^m(z) with
// integral over the sphere of (q_l^m)^2 * trig^2 equal to 1 (m = 0) or 1/2 (m > 0).
double normalized_legendre(int l, int m, double z, double s)
{
    double pmm = 1.0 / std::sqrt(4.0 * pi);
    for (int k = 1; k <= m; ++k)
        pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    if (l == m)
        return pmm;
    double p1 = std::sqrt(2.0 * m + 3.0) * z * pmm;
    if (l == m + 1)
        return p1;
    double p2 = pmm;
    for (int ll = m + 2; ll <= l; ++ll) {
        const double L = ll, M = m;
        const double a = std::sqrt((4.0 * L * L - 1.0) / (L * L - M * M));
        const double b = std::sqrt(((L - 1.0) * (L - 1.0) - M * M) / (4.0 * (L - 1.0) * (L - 1.0) - 1.0));
        const double p = a * (z * p1 - b * p2);
        p2 = p1;
        p1 = p;
    }
    return p1;
}

} // namespace

double SpectralBasis::eval(std::size_t m, const Point& x) const
{
    const Mode& md = modes_.at(m);
    switch (manifold_.kind) {
    case Kind::Circle: {
        if (md.a == 0)
            return 1.0 / std::sqrt(2.0 * pi);
        const double a = md.a * x.c[0];
        return (md.b == 1 ? std::cos(a) : std::sin(a)) / std::sqrt(pi);
    }
    case Kind::Torus2: {
        auto one = [](int index, double theta) {
            if (index == 0)
                return 1.0 / std::sqrt(2.0 * pi);
            const int k = circle_mode_frequency(index);
            return (index % 2 == 1 ? std::cos(k * theta) : std::sin(k * theta)) / std::sqrt(pi);
        };
        return one(md.a, x.c[0]) * one(md.b, x.c[1]);
    }
    case Kind::Sphere2: {
        const double z = x.c[2];
        const double s = std::hypot(x.c[0], x.c[1]);
        const int am = std::abs(md.b);
        const double q = normalized_legendre(md.a, am, z, s);
        if (am == 0)
            return q;
        const double phi = std::atan2(x.c[1], x.c[0]);
        return std::sqrt(2.0) * q * (md.b > 0 ? std::cos(am * phi) : std::sin(am * phi));
    }
    case Kind::IntervalDirichlet:
        return std::sqrt(2.0 / pi) * std::sin(md.a * x.c[0]);
    }
    return 0.0;
}

void SpectralBasis::eval_all(const Point& x, std::span<double> out) const
{
    if (out.size() != modes_.size())
        throw ArgumentError("eval_all: output span has the wrong size");
    const int K = max_freq_;
    switch (manifold_.kind) {
    case Kind::Circle: {
        circle_table(x.c[0], K, out.data());
        break;
    }
    case Kind::Torus2: {
        thread_local std::vector<double> t1, t2;
        t1.resize(2 * K + 1);
        t2.resize(2 * K + 1);
        circle_table(x.c[0], K, t1.data());
        circle_table(x.c[1], K, t2.data());
        for (std::size_t m = 0; m < modes_.size(); ++m)
            out[m] = t1[modes_[m].a] * t2[modes_[m].b];
        break;
    }
    case Kind::Sphere2: {
        const double z = x.c[2];
        const double s = std::hypot(x.c[0], x.c[1]);
        double c1 = 1.0, s1 = 0.0;
        if (s > 0.0) {
            c1 = x.c[0] / s;
            s1 = x.c[1] / s;
        }
        const double r2 = std::sqrt(2.0);
        double cm = 1.0, sm = 0.0; // cos(m phi), sin(m phi)
        double pmm = 1.0 / std::sqrt(4.0 * pi);
        for (int m = 0; m <= K; ++m) {
            if (m > 0) {
                pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
                const double cn = cm * c1 - sm * s1;
                sm = sm * c1 + cm * s1;
                cm = cn;
            }
            auto put = [&](int l, double q) {
                const std::size_t centre = static_cast<std::size_t>(l) * (l + 1);
                if (m == 0) {
                    out[centre] = q;
                } else {
                    out[centre + m] = r2 * q * cm;
                    out[centre - m] = r2 * q * sm;
                }
            };
            put(m, pmm);
            if (m == K)
                continue;
            double p2 = pmm;
            double p1 = std::sqrt(2.0 * m + 3.0) * z * pmm;
            put(m + 1, p1);
            for (int l = m + 2; l <= K; ++l) {
                const double p = rec_a_[tri(l, m)] * (z * p1 - rec_b_[tri(l, m)] * p2);
                p2 = p1;
                p1 = p;
                put(l, p);
            }
        }
        break;
    }
    case Kind::IntervalDirichlet: {
        const double c = std::sqrt(2.0 / pi);
        for (int k = 1; k <= K; ++k)
            out[k - 1] = c * std::sin(k * x.c[0]);
        break;
    }
    }
}

BasisPtr enumerate_basis(const ManifoldSpec& manifold, double band, std::size_t mode_cap)
{
    return std::make_shared<const SpectralBasis>(manifold, band, mode_cap);
}

double eval_mode(const SpectralBasis& basis, std::size_t m, const Point& x)
{
    return basis.eval(m, x);
}

// ---------------------------------------------------------------------------

SpectralFunction::SpectralFunction(BasisPtr basis)
  : basis_(std::move(basis)), c_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_->size())))
{
}

SpectralFunction::SpectralFunction(BasisPtr basis, Eigen::VectorXd coefficients)
  : basis_(std::move(basis)), c_(std::move(coefficients))
{
    if (static_cast<std::size_t>(c_.size()) != basis_->size())
        throw ArgumentError("coefficient vector length does not match the basis size");
}

double SpectralFunction::band() const
{
    for (Eigen::Index m = c_.size() - 1; m >= 0; --m)
        if (c_[m] != 0.0)
            return basis_->eigenvalue(static_cast<std::size_t>(m));
    return 0.0;
}

SpectralFunction SpectralFunction::without_kernel() const
{
    Eigen::VectorXd c = c_;
    for (std::size_t m = 0; m < basis_->zero_mode_count(); ++m)
        c[static_cast<Eigen::Index>(m)] = 0.0;
    return {basis_, std::move(c)};
}

double SpectralFunction::operator()(const Point& x) const { return synthesize(*this, x); }

SpectralFunction SpectralFunction::operator+(const SpectralFunction& o) const
{
    if (basis_->size() != o.basis_->size())
        throw ArgumentError("cannot add functions over different bases");
    return {basis_, c_ + o.c_};
}

SpectralFunction SpectralFunction::operator-(const SpectralFunction& o) const
{
    if (basis_->size() != o.basis_->size())
        throw ArgumentError("cannot subtract functions over different bases");
    return {basis_, c_ - o.c_};
}

SpectralFunction SpectralFunction::operator*(double s) const { return {basis_, c_ * s}; }

double inner(const SpectralFunction& f, const SpectralFunction& g)
{
    const Eigen::Index n = std::min(f.coefficients().size(), g.coefficients().size());
    return f.coefficients().head(n).dot(g.coefficients().head(n));
}

SpectralFunction rebase(const SpectralFunction& f, BasisPtr target)
{
    if (target->manifold().kind != f.basis().manifold().kind)
        throw ArgumentError("rebase across different manifolds");
    const auto n_src = static_cast<Eigen::Index>(f.basis().size());
    const auto n_dst = static_cast<Eigen::Index>(target->size());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_dst);
    const Eigen::Index n = std::min(n_src, n_dst);
    c.head(n) = f.coefficients().head(n);
    for (Eigen::Index m = n; m < n_src; ++m)
        if (f.coefficients()[m] != 0.0) {
            std::ostringstream os;
            os << "function has band " << f.band() << " but target basis stops at " << target->band();
            throw TruncationError(os.str());
        }
    return {std::move(target), std::move(c)};
}

double synthesize(const SpectralFunction& f, const Point& x)
{
    thread_local std::vector<double> buf;
    buf.resize(f.basis().size());
    f.basis().eval_all(x, buf);
    double s = 0.0;
    const auto& c = f.coefficients();
    for (std::size_t m = 0; m < buf.size(); ++m)
        s += c[static_cast<Eigen::Index>(m)] * buf[m];
    return s;
}

SpectralMultiplier multiplier_constant(double value)
{
    SpectralMultiplier F{[value](double) { return value; }};
    if (value == 0.0)
        F.support_max = 0.0;
    return F;
}

SpectralMultiplier multiplier_indicator(double upper)
{
    return {[upper](double s) { return (s >= 0.0 && s <= upper) ? 1.0 : 0.0; }, upper};
}

SpectralMultiplier multiplier_product(const SpectralMultiplier& f, const SpectralMultiplier& g)
{
    return {[f, g](double s) { return f(s) * g(s); }, std::min(f.support_max, g.support_max)};
}

SpectralFunction apply_multiplier(const SpectralMultiplier& F, double t, const SpectralFunction& f)
{
    if (!(t > 0.0))
        throw ArgumentError("multiplier scale t must be positive");
    Eigen::VectorXd c = f.coefficients();
    for (Eigen::Index m = 0; m < c.size(); ++m)
        c[m] *= F(t * f.basis().eigenvalue(static_cast<std::size_t>(m)));
    return {f.basis_ptr(), std::move(c)};
}

double kernel_eval(const SpectralMultiplier& F, double t, const Point& x, const Point& y,
                   const SpectralBasis& basis)
{
    if (!(t > 0.0))
        throw ArgumentError("kernel scale t must be positive");
    if (F.support_max / t > basis.band()) {
        std::ostringstream os;
        os << "kernel needs eigenvalues up to " << F.support_max / t << " but the basis stops at "
           << basis.band();
        throw TruncationError(os.str());
    }
    thread_local std::vector<double> ux, uy;
    ux.resize(basis.size());
    uy.resize(basis.size());
    basis.eval_all(x, ux);
    basis.eval_all(y, uy);
    double s = 0.0;
    for (std::size_t m = 0; m < ux.size(); ++m) {
        const double w = F(t * basis.eigenvalue(m));
        if (w != 0.0)
            s += w * (ux[m] * uy[m]);
    }
    return s;
}

} // namespace mf

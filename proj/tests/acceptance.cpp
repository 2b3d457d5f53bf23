// One line per acceptance criterion; exit status 1 if any fails.

#include "mf/cubature.hpp"
#include "mf/errors.hpp"
#include "mf/filterbank.hpp"
#include "mf/format.hpp"
#include "mf/lattice.hpp"
#include "mf/rng.hpp"
#include "mf/sampling.hpp"
#include "mf/splines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace mf;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t seed = 20240611;
constexpr double delta = 0.5;

struct Outcome
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [fail]");
    }
};

std::string e(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<Kind> all_kinds{Kind::Circle, Kind::Torus2, Kind::Sphere2, Kind::IntervalDirichlet};

std::vector<double> c0_grid(Kind k)
{
    return k == Kind::Torus2 ? std::vector<double>{25.0, 100.0} : std::vector<double>{100.0, 400.0};
}

std::vector<double> a0_grid(Kind k)
{
    return k == Kind::Sphere2 ? std::vector<double>{110.0, 420.0} : std::vector<double>{100.0, 400.0};
}

// Calibrated constants are computed once and shared by the criteria that need them.
std::map<Kind, double> c0_cache, a0_cache;

double c0_of(Kind k)
{
    auto it = c0_cache.find(k);
    if (it == c0_cache.end())
        it = c0_cache.emplace(k, calibrate_c0(ManifoldSpec::of(k), delta, c0_grid(k), derive_seed(seed, "c0")).c0).first;
    return it->second;
}

double a0_of(Kind k)
{
    auto it = a0_cache.find(k);
    if (it == a0_cache.end())
        it = a0_cache.emplace(k, calibrate_a0(ManifoldSpec::of(k), a0_grid(k), derive_seed(seed, "a0")).a0).first;
    return it->second;
}

Outcome partition_of_unity()
{
    const FilterBank fb = make_filter();
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double s = std::exp2(-8.0 + 20.0 * i / 9999.0);
        double acc = 0.0;
        for (int j = -10; j <= 12; ++j)
            acc += fb.phi_sq_at(j, s);
        worst = std::max(worst, std::abs(acc - 1.0));
    }
    Outcome o;
    o.require(worst <= 1e-12, "max |sum Phi^2 - 1| = " + e(worst));
    return o;
}

Outcome energy_identity()
{
    const FilterBank fb = make_filter();
    Outcome o;
    for (Kind k : all_kinds) {
        const auto M = ManifoldSpec::of(k);
        const auto b = enumerate_basis(M, 1000.0);
        Rng rng(derive_seed(seed, "energy", static_cast<std::uint64_t>(k)));
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const SpectralFunction f = random_function(b, 1000.0, rng);
            double sum = 0.0;
            for (const BandComponent& g : band_decompose(f, fb))
                sum += g.g.squared_norm();
            worst = std::max(worst, std::abs(sum - f.without_kernel().squared_norm()) / f.squared_norm());
        }
        o.require(worst <= 1e-12, M.name() + " " + e(worst));
    }
    return o;
}

Outcome plancherel_polya()
{
    Outcome o;
    for (Kind k : {Kind::Circle, Kind::Sphere2}) {
        const auto M = ManifoldSpec::of(k);
        const double c0 = c0_of(k);
        double worst = 1.0;
        for (double w : {100.0, 400.0})
            for (std::uint64_t i = 0; i < 3; ++i) {
                const Lattice L = generate_lattice(M, c0 / std::sqrt(w), derive_seed(seed, "pp-fresh", i));
                worst = std::min(worst, default_weights(L, w).bounds->ratio());
            }
        o.require(worst >= 1.0 - delta, M.name() + " c0 " + e(c0) + " min A/B " + e(worst));
    }
    Lattice U{ManifoldSpec::of(Kind::Circle), {}, 0.2, {}};
    for (int i = 0; i < 64; ++i)
        U.points.push_back(circle_point(2.0 * pi * i / 64));
    const FrameBounds b = *default_weights(U, 100.0).bounds;
    o.require(std::abs(b.B - b.A) <= 1e-10, "uniform circle B - A = " + e(b.B - b.A));
    return o;
}

Outcome frame_sandwich()
{
    const FilterBank fb = make_filter();
    const std::map<Kind, double> bands{
        {Kind::Circle, 1024.0}, {Kind::Torus2, 144.0}, {Kind::Sphere2, 256.0}, {Kind::IntervalDirichlet, 1024.0}};
    Outcome o;
    for (Kind k : all_kinds) {
        const auto M = ManifoldSpec::of(k);
        FrameOptions fo;
        fo.band = bands.at(k);
        fo.delta = delta;
        fo.c0 = c0_of(k);
        const auto r = fb.scales_for(first_positive_eigenvalue(M), fo.band);
        fo.j_min = r.j_min;
        fo.j_max = r.j_max;
        const Frame F = build_frame(M, fb, fo, derive_seed(seed, "frame"));
        Rng rng(derive_seed(seed, "frame-functions", static_cast<std::uint64_t>(k)));
        double lo = INFINITY, hi = 0.0, rt = 0.0;
        for (int t = 0; t < 100; ++t) {
            const SpectralFunction f = random_function(F.basis, fo.band, rng);
            const SpectralFunction p = f.without_kernel();
            const Eigen::VectorXd a = frame_analysis(f, F);
            const double ratio = a.squaredNorm() / p.squared_norm();
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            rt = std::max(rt, (frame_reconstruct(a, F).f - p).norm() / p.norm());
        }
        o.require(lo >= 1.0 - delta && hi <= 1.0 + 1e-10 && rt <= 1e-7,
                  M.name() + " ratio [" + e(lo) + ", " + e(hi) + "] roundtrip " + e(rt));
    }
    return o;
}

Outcome localization()
{
    const FilterBank fb = make_filter();
    Outcome o;
    for (Kind k : {Kind::Circle, Kind::Sphere2}) {
        const auto M = ManifoldSpec::of(k);
        const Point c = k == Kind::Circle ? circle_point(1.3) : sphere_point(-0.2, 0.6, 0.7);
        for (int j : {4, 5}) {
            const auto b = enumerate_basis(M, scale_band_hi(j));
            const SpectralFunction atom = make_atom(b, fb, j, c, 1.0, scale_band_hi(j));
            const DecayReport rep = localization_profile(atom, j, c, radial_probes(M, c, pi, 4001));
            o.require(rep.exponent >= 3.0, M.name() + " j" + std::to_string(j) + " N " + e(rep.exponent));
        }
    }
    return o;
}

Outcome product_property()
{
    Outcome o;
    for (Kind k : {Kind::Circle, Kind::Torus2, Kind::Sphere2}) {
        const auto M = ManifoldSpec::of(k);
        const double w = k == Kind::Sphere2 ? 110.0 : 100.0;
        const ProductAnalyzer an(M, w);
        const auto b = enumerate_basis(M, w);
        Rng rng(derive_seed(seed, "product", static_cast<std::uint64_t>(k)));
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const SpectralFunction f = random_function(b, w, rng), g = random_function(b, w, rng);
            worst = std::max(worst, an.check(f, g).fraction());
        }
        o.require(worst <= 1e-10, M.name() + " " + e(worst));
    }
    return o;
}

Outcome cubature()
{
    Outcome o;
    for (Kind k : all_kinds) {
        const auto M = ManifoldSpec::of(k);
        const double a0 = a0_of(k);
        double moment = 0.0, spread = 0.0, least = INFINITY;
        for (double w : a0_grid(k)) {
            const Lattice L = generate_lattice(M, a0 / std::sqrt(w + 1.0), derive_seed(seed, "cubature-fresh"));
            const CubatureRule r = build_cubature(L, w);
            moment = std::max(moment, r.max_moment_error);
            spread = std::max(spread, r.spread());
            least = std::min(least, *std::min_element(r.weights.begin(), r.weights.end()));
        }
        o.require(moment <= 1e-10 && least > 0.0 && spread <= 10.0,
                  M.name() + " a0 " + e(a0) + " moments " + e(moment) + " min weight " + e(least) + " spread " +
                      e(spread));
    }
    return o;
}

Outcome parseval()
{
    const FilterBank fb = make_filter();
    Outcome o;
    for (auto [k, band] : {std::pair{Kind::Sphere2, 930.0}, std::pair{Kind::Torus2, 900.0}}) {
        const auto M = ManifoldSpec::of(k);
        ParsevalOptions po;
        po.band = band;
        po.a0 = a0_of(k);
        const auto r = fb.scales_for(first_positive_eigenvalue(M), band);
        po.j_min = r.j_min;
        po.j_max = r.j_max;
        const ParsevalFrame pf = build_parseval_frame(M, fb, po, derive_seed(seed, "parseval"));
        Rng rng(derive_seed(seed, "parseval-functions", static_cast<std::uint64_t>(k)));
        Eigen::MatrixXd C(static_cast<Eigen::Index>(pf.basis->size()), 100);
        for (Eigen::Index i = 0; i < C.cols(); ++i)
            C.col(i) = random_function(pf.basis, band, rng, true).coefficients();
        const Eigen::MatrixXd A = parseval_analysis(C, pf);
        const Eigen::MatrixXd R = parseval_synthesis(A, pf);
        double gap = 0.0, rt = 0.0;
        for (Eigen::Index i = 0; i < C.cols(); ++i) {
            const double n = C.col(i).squaredNorm();
            gap = std::max(gap, std::abs(A.col(i).squaredNorm() - n) / n);
            rt = std::max(rt, (R.col(i) - C.col(i)).norm() / C.col(i).norm());
        }
        o.require(gap <= 1e-8 && rt <= 1e-8, M.name() + " " + std::to_string(pf.atom_count()) + " atoms gap " +
                                                 e(gap) + " roundtrip " + e(rt));
    }
    return o;
}

Outcome splines()
{
    Outcome o;
    for (Kind k : {Kind::Circle, Kind::Torus2}) {
        const auto M = ManifoldSpec::of(k);
        const double w = 1.0;
        const auto b = enumerate_basis(M, w);
        Rng rng(derive_seed(seed, "spline-function", static_cast<std::uint64_t>(k)));
        const SpectralFunction f = random_function(b, w, rng);
        const Lattice L = generate_lattice(M, 0.3 / std::sqrt(w), derive_seed(seed, "spline-lattice"));
        const SplineTable t = spline_reconstruct(f, L, spline_orders(M, 3));
        bool strict = true;
        double residual = 0.0;
        std::string errs;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (i > 0 && t.rows[i].sup_error > t.rows[i - 1].sup_error)
                strict = false;
            residual = std::max(residual, t.rows[i].residual);
            errs += (i ? " " : "") + e(t.rows[i].sup_error);
        }
        const double ratio = t.rows.back().sup_error / t.rows.front().sup_error;
        o.require(strict, M.name() + " errors " + errs + " nonincreasing");
        o.require(ratio <= 1e-2, "ratio " + e(ratio));
        o.require(residual <= 1e-9, "residual " + e(residual));
        o.detail += " (up to roundoff floor " + e(t.floor) + ": " + (t.monotone ? "monotone" : "not monotone") + ")";
    }
    return o;
}

Outcome weyl()
{
    Outcome o;
    for (Kind k : all_kinds) {
        const auto M = ManifoldSpec::of(k);
        auto r = [&](double w) {
            return static_cast<double>(enumerate_basis(M, w)->size()) / (M.volume * std::pow(w, M.dim / 2.0));
        };
        double worst = 0.0;
        for (double w : {100.0, 400.0, 1600.0})
            worst = std::max(worst, std::abs(r(4.0 * w) / r(w) - 1.0));
        o.require(worst <= 0.25, M.name() + " " + e(worst));
    }
    return o;
}

std::map<std::string, std::string> read_tree(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        std::ifstream is(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        files[entry.path().filename().string()] = ss.str();
    }
    return files;
}

Outcome reproducibility()
{
    const std::vector<std::string> commands{
        "calibrate --manifold circle",
        "basis --manifold sphere2 --omega 60",
        "lattice --manifold torus2 --rho 0.4",
        "pp-bounds --manifold circle --omega 100",
        "frame --manifold circle --samples 5",
        "decompose --manifold circle",
        "reconstruct --manifold circle --input decompose-circle.csv --reference decompose-function-circle.csv",
        "cubature --manifold circle --omega 100",
        "parseval --manifold circle --samples 5",
        "spline --manifold torus2",
        "report",
    };
    const fs::path root = fs::path(MF_WORK_DIR) / "reproducibility";
    fs::remove_all(root);
    Outcome o;
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* run : {"a", "b"}) {
        const fs::path out = root / run;
        fs::create_directories(out);
        // identical configs: every path is relative to the output directory
        for (const std::string& c : commands) {
            const std::string cmd = "cd \"" + out.string() + "\" && \"" + MF_TOOL + "\" " + c +
                                    " --seed 3 --format json --out . >> ../log.txt 2>&1";
            if (std::system(cmd.c_str()) != 0)
                o.require(false, "'" + c + "' exited nonzero");
        }
        runs.push_back(read_tree(out));
    }
    std::size_t same = 0;
    for (const auto& [name, body] : runs[0]) {
        const auto it = runs[1].find(name);
        if (it != runs[1].end() && it->second == body)
            ++same;
        else
            o.require(false, name + " differs");
    }
    o.require(runs[0].size() == runs[1].size() && same == runs[0].size() && same > 0,
              std::to_string(same) + "/" + std::to_string(runs[0].size()) + " files byte-identical");
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"partition of unity", partition_of_unity},
        {"energy identity", energy_identity},
        {"sampling bounds", plancherel_polya},
        {"frame sandwich", frame_sandwich},
        {"localization", localization},
        {"product property", product_property},
        {"cubature", cubature},
        {"Parseval tightness", parseval},
        {"spline convergence", splines},
        {"Weyl ratio", weyl},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o.require(false, std::string("error: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("criterion %2zu %s  %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

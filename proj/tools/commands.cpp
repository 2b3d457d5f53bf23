#include "commands.hpp"

#include "mf/cubature.hpp"
#include "mf/errors.hpp"
#include "mf/filterbank.hpp"
#include "mf/format.hpp"
#include "mf/lattice.hpp"
#include "mf/rng.hpp"
#include "mf/sampling.hpp"
#include "mf/splines.hpp"
#include "mf/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mftool {

namespace fs = std::filesystem;
using mf::fmt;

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string str(std::size_t v) { return std::to_string(v); }

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (double x : v)
        s += (s.empty() ? "" : " ") + fmt(x);
    return s;
}

std::vector<std::string> coordinate_columns(mf::Kind kind)
{
    switch (kind) {
    case mf::Kind::Circle:
        return {"theta"};
    case mf::Kind::Torus2:
        return {"theta1", "theta2"};
    case mf::Kind::Sphere2:
        return {"x", "y", "z"};
    case mf::Kind::IntervalDirichlet:
        return {"x"};
    }
    return {};
}

void append_point(std::vector<std::string>& row, const mf::Point& p)
{
    const int n = mf::coordinate_count(p.kind);
    for (int a = 0; a < n; ++a)
        row.push_back(fmt(p.c[static_cast<std::size_t>(a)]));
}

Table make_table(const Context& cx, const std::string& stem)
{
    Table t;
    t.stem = stem;
    t.config = cx.config;
    return t;
}

// CSV with '#' header lines, a column row and data rows.
struct CsvData
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, const std::string& file) const
    {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end())
            throw mf::ArgumentError(file + " has no column '" + name + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }
};

CsvData read_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw mf::ArgumentError("cannot read " + path);
    CsvData d;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (d.columns.empty())
            d.columns = std::move(cells);
        else
            d.rows.push_back(std::move(cells));
    }
    return d;
}

double to_double(const std::string& s)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw mf::ArgumentError("not a number: '" + s + "'");
    }
}

struct Constants
{
    std::map<std::string, std::string> values;
    std::string path;

    double get(const std::string& key) const
    {
        const auto it = values.find(key);
        if (it == values.end())
            throw mf::CalibrationError(path + " has no " + key + ": run calibrate first");
        return to_double(it->second);
    }
};

fs::path constants_path(const Options& o, const mf::ManifoldSpec& M)
{
    return o.constants.empty() ? fs::path(o.out) / ("constants-" + M.name() + ".txt") : fs::path(o.constants);
}

Constants load_constants(const Options& o, const mf::ManifoldSpec& M)
{
    const fs::path p = constants_path(o, M);
    if (!fs::exists(p))
        throw mf::CalibrationError("constants file " + p.string() + " not found: run calibrate first");
    Constants c;
    c.path = p.string();
    for (auto& [k, v] : read_key_values(p))
        c.values[k] = v;
    const auto it = c.values.find("manifold");
    if (it == c.values.end() || it->second != M.name())
        throw mf::CalibrationError(c.path + " does not hold constants for " + M.name() + ": run calibrate first");
    return c;
}

double calibrated_c0(const Options& o, const mf::ManifoldSpec& M)
{
    const Constants c = load_constants(o, M);
    if (c.get("delta") != o.delta)
        throw mf::CalibrationError(c.path + " was calibrated for delta = " + fmt(c.get("delta")) +
                                   ": run calibrate --delta " + fmt(o.delta) + " first");
    return c.get("c0");
}

mf::SpectralFunction read_function(const std::string& path, mf::BasisPtr basis)
{
    const CsvData d = read_csv(path);
    const std::size_t cm = d.column("m", path), cc = d.column("coefficient", path);
    std::size_t top = 0;
    for (const auto& r : d.rows)
        top = std::max(top, static_cast<std::size_t>(to_double(r.at(cm))) + 1);
    if (top > basis->size())
        throw mf::TruncationError(path + " has modes beyond the frame band");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(idx(basis->size()));
    for (const auto& r : d.rows)
        c[static_cast<Eigen::Index>(to_double(r.at(cm)))] = to_double(r.at(cc));
    return mf::SpectralFunction(std::move(basis), std::move(c));
}

Table function_table(const Context& cx, const std::string& stem, const mf::SpectralFunction& f)
{
    Table t = make_table(cx, stem);
    t.columns = {"m", "lambda", "mode", "coefficient"};
    for (std::size_t m = 0; m < f.basis().size(); ++m)
        t.add({str(m), fmt(f.basis().eigenvalue(m)), f.basis().describe(m), fmt(f.coefficient(m))});
    return t;
}

mf::Frame make_frame(const Options& o, const mf::ManifoldSpec& M)
{
    const mf::FilterBank fb = mf::make_filter();
    mf::FrameOptions fo;
    fo.band = o.band > 0.0 ? o.band : 256.0;
    fo.delta = o.delta;
    fo.c0 = calibrated_c0(o, M);
    const auto r = fb.scales_for(mf::first_positive_eigenvalue(M), fo.band);
    fo.j_min = o.jmin_set ? o.jmin : r.j_min;
    fo.j_max = o.jmax_set ? o.jmax : r.j_max;
    return mf::build_frame(M, fb, fo, mf::derive_seed(o.seed, "frame"));
}

} // namespace

void run_basis(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    const auto basis = mf::enumerate_basis(M, o.omega);
    Table t = make_table(cx, "basis-" + M.name());
    t.columns = {"m", "lambda", "a", "b", "mode"};
    for (std::size_t m = 0; m < basis->size(); ++m) {
        const mf::Mode& md = basis->mode(m);
        t.add({str(m), fmt(md.lambda), std::to_string(md.a), std::to_string(md.b), basis->describe(m)});
    }
    t.result("modes", str(basis->size()));
    write_table(cx.out, t, cx.json);
}

void run_lattice(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    const mf::Lattice L = mf::generate_lattice(M, o.rho, mf::derive_seed(o.seed, "lattice"));
    Table t = make_table(cx, "lattice-" + M.name());
    t.columns = {"k"};
    for (auto& c : coordinate_columns(M.kind))
        t.columns.push_back(c);
    for (std::size_t k = 0; k < L.size(); ++k) {
        std::vector<std::string> row{str(k)};
        append_point(row, L.points[k]);
        t.add(std::move(row));
    }
    t.result("card", str(L.size()));
    t.result("min_distance", fmt(L.measured.min_distance));
    t.result("covering_radius", fmt(L.measured.covering_radius));
    t.result("multiplicity", std::to_string(L.measured.multiplicity));
    write_table(cx.out, t, cx.json);
}

void run_pp_bounds(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    double rho = o.rho;
    mf::Lattice L;
    if (!o.points.empty()) {
        if (!(rho > 0.0))
            throw mf::ArgumentError("--points needs --rho (the spacing the points were built for)");
        std::ifstream is(o.points);
        if (!is)
            throw mf::ArgumentError("cannot read " + o.points);
        L = mf::Lattice{M, mf::read_points_csv(is, M.kind), rho, {}};
        if (L.size() == 0)
            throw mf::ArgumentError(o.points + " holds no points");
    } else {
        if (!(rho > 0.0))
            rho = calibrated_c0(o, M) / std::sqrt(o.omega);
        L = mf::generate_lattice(M, rho, mf::derive_seed(o.seed, "pp-lattice"));
    }
    const mf::SamplingSet ss = mf::default_weights(L, o.omega);
    const mf::FrameBounds b = *ss.bounds;
    Table t = make_table(cx, "pp-bounds-" + M.name());
    t.columns = {"omega", "rho", "card", "dim", "A", "B", "ratio", "pass"};
    const bool pass = b.ratio() >= 1.0 - o.delta;
    t.add({fmt(o.omega), fmt(rho), str(b.card), str(b.dim), fmt(b.A), fmt(b.B), fmt(b.ratio()), pass ? "1" : "0"});
    write_table(cx.out, t, cx.json);
}

void run_frame(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    const mf::Frame F = make_frame(o, M);

    Table atoms = make_table(cx, "frame-" + M.name());
    atoms.columns = {"atom", "j", "k"};
    for (auto& c : coordinate_columns(M.kind))
        atoms.columns.push_back(c);
    for (const char* c : {"mu", "band_lo", "band_hi", "norm"})
        atoms.columns.emplace_back(c);
    for (std::size_t i = 0; i < F.atom_count(); ++i) {
        const mf::FrameAtom a = F.atom(i);
        std::vector<std::string> row{str(i), std::to_string(a.j), str(a.k)};
        append_point(row, a.center);
        row.push_back(fmt(a.mu));
        row.push_back(fmt(a.band_lo));
        row.push_back(fmt(a.band_hi));
        row.push_back(fmt(a.rep.norm()));
        atoms.add(std::move(row));
    }
    atoms.result("atoms", str(F.atom_count()));
    write_table(cx.out, atoms, cx.json);

    Table rep = make_table(cx, "frame-report-" + M.name());
    rep.columns = {"j", "omega", "rho", "refinements", "card", "A", "B", "ratio"};
    for (const mf::FrameScale& s : F.scales)
        rep.add({std::to_string(s.j), fmt(s.omega), fmt(s.rho), std::to_string(s.refinements),
                 str(s.lattice.size()), fmt(s.bounds.A), fmt(s.bounds.B), fmt(s.bounds.ratio())});
    mf::Rng rng(mf::derive_seed(o.seed, "frame-samples"));
    double lo = INFINITY, hi = 0.0, worst = 0.0;
    for (int i = 0; i < o.samples; ++i) {
        const mf::SpectralFunction f = mf::random_function(F.basis, F.options.band, rng);
        const Eigen::VectorXd a = mf::frame_analysis(f, F);
        const double r = a.squaredNorm() / f.without_kernel().squared_norm();
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        const mf::FrameReconstruction back = mf::frame_reconstruct(a, F);
        const mf::SpectralFunction p = f.without_kernel();
        worst = std::max(worst, (back.f - p).norm() / p.norm());
    }
    rep.result("lower_bound", fmt(F.lower_bound()));
    rep.result("upper_bound", fmt(F.upper_bound()));
    if (o.samples > 0) {
        rep.result("min_ratio", fmt(lo));
        rep.result("max_ratio", fmt(hi));
        rep.result("max_roundtrip_error", fmt(worst));
    }
    write_table(cx.out, rep, cx.json);
}

void run_decompose(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    const mf::Frame F = make_frame(o, M);
    mf::Rng rng(mf::derive_seed(o.seed, "decompose-function"));
    const mf::SpectralFunction f =
        o.input.empty() ? mf::random_function(F.basis, F.options.band, rng) : read_function(o.input, F.basis);
    const Eigen::VectorXd a = mf::frame_analysis(f, F);

    Table t = make_table(cx, "decompose-" + M.name());
    t.columns = {"atom", "j", "k", "coefficient"};
    std::size_t i = 0;
    for (const mf::FrameScale& s : F.scales)
        for (std::size_t k = 0; k < s.lattice.size(); ++k, ++i)
            t.add({str(i), std::to_string(s.j), str(k), fmt(a[idx(i)])});
    t.result("norm_sq", fmt(f.squared_norm()));
    t.result("kernel_free_norm_sq", fmt(f.without_kernel().squared_norm()));
    t.result("frame_energy", fmt(a.squaredNorm()));
    for (const mf::BandComponent& g : mf::band_decompose(f, F.filter))
        t.result("band_energy.j" + std::to_string(g.j), fmt(g.g.squared_norm()));
    write_table(cx.out, t, cx.json);
    write_table(cx.out, function_table(cx, "decompose-function-" + M.name(), f), cx.json);
}

void run_reconstruct(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    const mf::Frame F = make_frame(o, M);
    const CsvData d = read_csv(o.input);
    const std::size_t cc = d.column("coefficient", o.input);
    if (d.rows.size() != F.atom_count())
        throw mf::ArgumentError(o.input + " has " + str(d.rows.size()) + " coefficients, the frame has " +
                                str(F.atom_count()) + " atoms");
    Eigen::VectorXd a(idx(d.rows.size()));
    for (std::size_t i = 0; i < d.rows.size(); ++i)
        a[idx(i)] = to_double(d.rows[i].at(cc));
    const mf::FrameReconstruction r = mf::frame_reconstruct(a, F);
    Table t = function_table(cx, "reconstruct-" + M.name(), r.f);
    t.result("iterations", std::to_string(r.iterations));
    t.result("relative_residual", fmt(r.relative_residual));
    if (!o.reference.empty()) {
        const mf::SpectralFunction p = read_function(o.reference, F.basis).without_kernel();
        t.result("relative_error", fmt((r.f - p).norm() / p.norm()));
    }
    write_table(cx.out, t, cx.json);
}

void run_cubature(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    const double rho = o.rho > 0.0 ? o.rho : load_constants(o, M).get("a0") / std::sqrt(o.omega + 1.0);
    const mf::Lattice L = mf::generate_lattice(M, rho, mf::derive_seed(o.seed, "cubature-lattice"));
    const mf::CubatureRule r = mf::build_cubature(L, o.omega);
    Table t = make_table(cx, "cubature-" + M.name());
    t.columns = {"k"};
    for (auto& c : coordinate_columns(M.kind))
        t.columns.push_back(c);
    t.columns.emplace_back("voronoi");
    t.columns.emplace_back("weight");
    for (std::size_t k = 0; k < L.size(); ++k) {
        std::vector<std::string> row{str(k)};
        append_point(row, L.points[k]);
        row.push_back(fmt(r.voronoi[k]));
        row.push_back(fmt(r.weights[k]));
        t.add(std::move(row));
    }
    t.result("rho", fmt(rho));
    t.result("card", str(L.size()));
    t.result("moments", str(r.moments));
    t.result("max_moment_error", fmt(r.max_moment_error));
    t.result("min_weight", fmt(*std::min_element(r.weights.begin(), r.weights.end())));
    t.result("c1", fmt(r.c1));
    t.result("c2", fmt(r.c2));
    t.result("spread", fmt(r.spread()));
    t.result("iterations", std::to_string(r.iterations));
    write_table(cx.out, t, cx.json);
}

void run_parseval(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    if (M.kind == mf::Kind::IntervalDirichlet)
        throw mf::UnsupportedError("the Parseval frame needs the product property; interval has no group action");
    const mf::FilterBank fb = mf::make_filter();
    const double lambda1 = mf::first_positive_eigenvalue(M);
    mf::ParsevalOptions po;
    po.a0 = load_constants(o, M).get("a0");
    if (o.band > 0.0)
        po.band = o.band;
    else if (o.jmax_set)
        po.band = mf::pow4(o.jmax);
    else
        po.band = 256.0;
    const auto need = fb.scales_for(lambda1, po.band);
    po.j_min = o.jmin_set ? o.jmin : need.j_min;
    po.j_max = o.jmax_set ? o.jmax : need.j_max;
    if (po.band > mf::pow4(po.j_max))
        throw mf::ArgumentError("band " + fmt(po.band) + " exceeds 4^jmax = " + fmt(mf::pow4(po.j_max)));
    // the scales resolve [4^(jmin+1), 4^jmax] exactly; lower scales are missing above need.j_min
    const double lo = po.j_min <= need.j_min ? 0.0 : mf::pow4(po.j_min + 1);
    const mf::ParsevalFrame pf = mf::build_parseval_frame(M, fb, po, mf::derive_seed(o.seed, "parseval"));

    mf::Rng rng(mf::derive_seed(o.seed, "parseval-samples"));
    const auto n = static_cast<Eigen::Index>(std::max(0, o.samples));
    Eigen::MatrixXd C(idx(pf.basis->size()), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd c = mf::random_function(pf.basis, po.band, rng, true).coefficients();
        for (std::size_t m = 0; m < pf.basis->size(); ++m)
            if (pf.basis->eigenvalue(m) < lo)
                c[idx(m)] = 0.0;
        C.col(i) = c;
    }
    const Eigen::MatrixXd A = mf::parseval_analysis(C, pf);
    const Eigen::MatrixXd R = mf::parseval_synthesis(A, pf);

    Table t = make_table(cx, "parseval-" + M.name());
    t.columns = {"sample", "frame_energy", "norm_energy", "relative_gap", "roundtrip_error"};
    double gap = 0.0, rt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double fe = A.col(i).squaredNorm(), ne = C.col(i).squaredNorm();
        const double g = std::abs(fe - ne) / ne;
        const double e = (R.col(i) - C.col(i)).norm() / C.col(i).norm();
        gap = std::max(gap, g);
        rt = std::max(rt, e);
        t.add({std::to_string(i), fmt(fe), fmt(ne), fmt(g), fmt(e)});
    }
    t.result("band", fmt(po.band));
    t.result("jmin", std::to_string(po.j_min));
    t.result("jmax", std::to_string(po.j_max));
    t.result("a0", fmt(po.a0));
    t.result("atoms", str(pf.atom_count()));
    t.result("max_relative_gap", fmt(gap));
    t.result("max_roundtrip_error", fmt(rt));
    write_table(cx.out, t, cx.json);

    Table s = make_table(cx, "parseval-scales-" + M.name());
    s.columns = {"j", "omega", "cubature_band", "nodes", "c1", "c2", "spread", "max_moment_error", "retries"};
    for (const mf::ParsevalScale& sc : pf.scales) {
        const mf::CubatureRule& r = *pf.rules[sc.rule];
        s.add({std::to_string(sc.j), fmt(sc.omega), fmt(sc.cubature_band), str(r.lattice.size()), fmt(r.c1),
               fmt(r.c2), fmt(r.spread()), fmt(r.max_moment_error), std::to_string(pf.retries[sc.rule])});
    }
    write_table(cx.out, s, cx.json);
}

void run_spline(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    if (!(o.omega > 0.0))
        throw mf::ArgumentError("spline test band omega must be positive");
    const double rho = o.rho > 0.0 ? o.rho : 0.3 / std::sqrt(o.omega);
    const int kmax = o.kmax > 0 ? o.kmax : 8 * M.dim;
    std::vector<int> orders;
    for (int k = M.dim; k <= kmax; k *= 2)
        orders.push_back(k);
    if (orders.empty())
        throw mf::ArgumentError("kmax " + std::to_string(kmax) + " is below the first order d = " +
                                std::to_string(M.dim));
    const mf::Lattice L = mf::generate_lattice(M, rho, mf::derive_seed(o.seed, "spline-lattice"));
    const auto basis = mf::enumerate_basis(M, o.omega);
    mf::Rng rng(mf::derive_seed(o.seed, "spline-function"));
    const mf::SpectralFunction f = mf::random_function(basis, o.omega, rng);
    mf::SplineOptions so;
    so.band = o.band;
    const mf::SplineTable st = mf::spline_reconstruct(f, L, orders, so);

    Table t = make_table(cx, "spline-" + M.name());
    t.columns = {"k", "sup_error", "l2_error", "residual", "fitted_rate"};
    for (const mf::SplineRow& r : st.rows)
        t.add({std::to_string(r.k), fmt(r.sup_error), fmt(r.l2_error), fmt(r.residual), fmt(st.fitted_rate)});
    t.result("nodes", str(st.nodes));
    t.result("band", fmt(st.band));
    t.result("probes", str(st.probes));
    t.result("rho", fmt(st.rho));
    t.result("rho_sqrt_omega", fmt(st.rho_sqrt_omega()));
    t.result("floor", fmt(st.floor));
    t.result("monotone", st.monotone ? "1" : "0");
    if (st.diverged_at)
        t.result("diverged_at", std::to_string(*st.diverged_at));
    t.result("fitted_rate", fmt(st.fitted_rate));
    write_table(cx.out, t, cx.json);
}

void run_calibrate(const Options& o, const Context& cx)
{
    const auto M = mf::ManifoldSpec::parse(o.manifold);
    std::vector<double> c0w = o.c0_omegas, a0w = o.a0_omegas;
    if (c0w.empty())
        c0w = M.kind == mf::Kind::Torus2 ? std::vector<double>{25.0, 100.0} : std::vector<double>{100.0, 400.0};
    if (a0w.empty())
        a0w = M.kind == mf::Kind::Sphere2 ? std::vector<double>{110.0, 420.0} : std::vector<double>{100.0, 400.0};
    mf::C0Options co;
    co.seeds = o.seeds;
    const mf::C0Calibration c0 = mf::calibrate_c0(M, o.delta, c0w, mf::derive_seed(o.seed, "c0"), co);
    const mf::A0Calibration a0 = mf::calibrate_a0(M, a0w, mf::derive_seed(o.seed, "a0"));

    Table t = make_table(cx, "calibrate-" + M.name());
    t.columns = {"stage", "constant", "omega", "seed", "card", "A", "B", "positive", "spread", "moment_error"};
    for (const mf::C0TraceRow& r : c0.trace)
        t.add({"c0", fmt(r.c), fmt(r.omega), std::to_string(r.seed), str(r.card), fmt(r.A), fmt(r.B), "", "", ""});
    for (const mf::A0TraceRow& r : a0.trace)
        t.add({"a0", fmt(r.a), fmt(r.omega), std::to_string(r.seed), str(r.card), "", "", r.positive ? "1" : "0", fmt(r.spread),
               fmt(r.moment_error)});
    t.result("c0", fmt(c0.c0));
    t.result("c0_edge", fmt(c0.edge));
    t.result("c0_omegas", join(c0w));
    t.result("a0", fmt(a0.a0));
    t.result("a0_edge", fmt(a0.edge));
    t.result("a0_omegas", join(a0w));
    write_table(cx.out, t, cx.json);

    std::ostringstream os;
    os << "# version = " << mf::version << '\n';
    os << "# seed = " << o.seed << '\n';
    os << "manifold = " << M.name() << '\n';
    os << "delta = " << fmt(o.delta) << '\n';
    os << "c0 = " << fmt(c0.c0) << '\n';
    os << "c0_edge = " << fmt(c0.edge) << '\n';
    os << "c0_omegas = " << join(c0w) << '\n';
    os << "a0 = " << fmt(a0.a0) << '\n';
    os << "a0_edge = " << fmt(a0.edge) << '\n';
    os << "a0_omegas = " << join(a0w) << '\n';
    write_atomic(constants_path(o, M), os.str());
}

void run_report(const Options& o, const Context& cx)
{
    (void)o;
    std::vector<fs::path> files;
    if (fs::exists(cx.out))
        for (const auto& e : fs::directory_iterator(cx.out)) {
            const fs::path p = e.path();
            const std::string name = p.filename().string();
            if (!e.is_regular_file() || name == "report.csv" || name == "report.json")
                continue;
            if (p.extension() == ".csv" || (name.rfind("constants-", 0) == 0 && p.extension() == ".txt"))
                files.push_back(p);
        }
    std::sort(files.begin(), files.end());

    Table t = make_table(cx, "report");
    t.columns = {"file", "key", "value"};
    for (const fs::path& p : files) {
        std::ifstream is(p, std::ios::binary);
        const std::string body((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char ch : body) {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
        const std::string name = p.filename().string();
        t.add({name, "fnv1a64", hex});
        std::istringstream ls(body);
        std::string line;
        std::size_t rows = 0;
        bool header = false;
        const bool constants = p.extension() == ".txt";
        while (std::getline(ls, line)) {
            if (line.rfind("# result.", 0) == 0) {
                const auto eq = line.find(" = ");
                if (eq != std::string::npos)
                    t.add({name, line.substr(9, eq - 9), line.substr(eq + 3)});
            } else if (constants && !line.empty() && line[0] != '#') {
                const auto eq = line.find(" = ");
                if (eq != std::string::npos)
                    t.add({name, line.substr(0, eq), line.substr(eq + 3)});
            } else if (!constants && !line.empty() && line[0] != '#') {
                if (header)
                    ++rows;
                header = true;
            }
        }
        if (!constants)
            t.add({name, "rows", str(rows)});
    }
    t.result("files", str(files.size()));
    write_table(cx.out, t, cx.json);
}

} // namespace mftool

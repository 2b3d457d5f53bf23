#include "commands.hpp"

#include "mf/errors.hpp"
#include "mf/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <iostream>
#include <map>

namespace {

using namespace mftool;

constexpr int exit_usage = 2;
constexpr int exit_failure = 1;

int report_error(const std::string& kind, const std::string& message, int code, const std::string& trace = {})
{
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    if (!trace.empty())
        j["trace"] = trace;
    std::cerr << j.dump() << '\n';
    return code;
}

struct Subcommand
{
    CLI::App* app;
    Options* opt;
    std::function<void(const Options&, const Context&)> run;
    CLI::Option* jmin = nullptr;
    CLI::Option* jmax = nullptr;
};

void add_common(CLI::App* sub, Options& o)
{
    sub->add_option("--manifold", o.manifold, "circle, torus2, sphere2 or interval");
    sub->add_option("--seed", o.seed, "global 64-bit seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "csv, or json to also write a JSON mirror")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", "key = value file; flags take precedence");
}

void add_frame_flags(Subcommand& s)
{
    Options& o = *s.opt;
    s.app->add_option("--band", o.band, "spectral truncation of the frame");
    s.jmin = s.app->add_option("--jmin", o.jmin, "finest scale index (default: from the spectrum)");
    s.jmax = s.app->add_option("--jmax", o.jmax, "coarsest scale index (default: from the band)");
    s.app->add_option("--delta", o.delta, "frame tolerance");
    s.app->add_option("--samples", o.samples, "random functions for the ratio report");
    s.app->add_option("--constants", o.constants, "constants file from calibrate");
}

// Arguments from --config that the command line does not set, appended as flags.
std::vector<std::string> with_config(std::vector<std::string> args, const CLI::App& app)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty() || args.empty())
        return args;
    const CLI::App* sub = app.get_subcommand(args[0]);
    std::vector<std::string> extra;
    for (const auto& [key, value] : read_key_values(path)) {
        const std::string flag = "--" + key;
        bool known = false;
        for (const CLI::App* s : app.get_subcommands({}))
            known = known || s->get_option_no_throw(flag) != nullptr;
        if (!known)
            throw mf::ArgumentError("unknown config key '" + key + "'");
        if (sub->get_option_no_throw(flag) == nullptr || key == "config")
            continue;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given)
            continue;
        extra.push_back(flag);
        std::istringstream vs(value);
        std::string tok;
        while (vs >> tok)
            extra.push_back(tok);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

KeyValues echo(const CLI::App& sub)
{
    KeyValues out;
    out.emplace_back("command", sub.get_name());
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "out" || name == "config" || name == "format")
            continue;
        std::string v;
        if (opt->count() > 0) {
            for (const std::string& r : opt->results())
                v += (v.empty() ? "" : " ") + r;
        } else {
            v = opt->get_default_str();
        }
        out.emplace_back(name, v);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bandlimited frames, positive cubature and variational splines on compact manifolds"};
    app.set_version_flag("--version", std::string(mf::version));
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::deque<Options> store;
    std::map<std::string, Subcommand> subs;
    auto add = [&](const std::string& name, const std::string& desc, auto run) -> Subcommand& {
        CLI::App* s = app.add_subcommand(name, desc);
        s->option_defaults()->always_capture_default();
        store.emplace_back();
        Subcommand& sc = subs[name];
        sc = {s, &store.back(), run};
        add_common(s, store.back());
        return sc;
    };

    {
        Subcommand& s = add("basis", "list the eigenfunctions with eigenvalue <= omega", run_basis);
        s.app->add_option("--omega", s.opt->omega, "band limit");
    }
    {
        Subcommand& s = add("lattice", "generate a rho-lattice", run_lattice);
        s.opt->rho = 0.5;
        s.app->add_option("--rho", s.opt->rho, "lattice spacing");
    }
    {
        Subcommand& s = add("pp-bounds", "sampling bounds A, B on E_omega", run_pp_bounds);
        s.app->add_option("--omega", s.opt->omega, "band limit");
        s.app->add_option("--rho", s.opt->rho, "lattice spacing (default: c0 omega^-1/2)");
        s.app->add_option("--delta", s.opt->delta, "required A/B >= 1 - delta");
        s.app->add_option("--points", s.opt->points, "lattice CSV to use instead of a generated lattice");
        s.app->add_option("--constants", s.opt->constants, "constants file from calibrate");
    }
    for (auto [name, desc, fn] : {std::tuple{"frame", "build the frame and report its bounds", &run_frame},
                                  std::tuple{"decompose", "frame coefficients of a function", &run_decompose},
                                  std::tuple{"reconstruct", "function from frame coefficients", &run_reconstruct}}) {
        Subcommand& s = add(name, desc, fn);
        add_frame_flags(s);
        if (std::string(name) != "frame")
            s.app->add_option("--input", s.opt->input,
                              std::string(name) == "decompose" ? "function coefficient CSV (default: random)"
                                                               : "frame coefficient CSV from decompose")
                ->required(std::string(name) == "reconstruct");
        if (std::string(name) == "reconstruct")
            s.app->add_option("--reference", s.opt->reference, "function coefficient CSV to compare against");
    }
    {
        Subcommand& s = add("cubature", "positive cubature weights exact on E_omega", run_cubature);
        s.app->add_option("--omega", s.opt->omega, "exactness band");
        s.app->add_option("--rho", s.opt->rho, "lattice spacing (default: a0 (omega + 1)^-1/2)");
        s.app->add_option("--constants", s.opt->constants, "constants file from calibrate");
    }
    {
        Subcommand& s = add("parseval", "tight frame from cubature and its tightness report", run_parseval);
        s.opt->samples = 10;
        s.app->add_option("--band", s.opt->band, "spectral truncation (default: 4^jmax)");
        s.jmin = s.app->add_option("--jmin", s.opt->jmin, "finest scale index");
        s.jmax = s.app->add_option("--jmax", s.opt->jmax, "coarsest scale index");
        s.app->add_option("--samples", s.opt->samples, "random zero-mean functions");
        s.app->add_option("--constants", s.opt->constants, "constants file from calibrate");
    }
    {
        Subcommand& s = add("spline", "spline reconstruction of a bandlimited function", run_spline);
        s.opt->omega = 1.0;
        s.app->add_option("--omega", s.opt->omega, "band of the test function");
        s.app->add_option("--rho", s.opt->rho, "lattice spacing (default: 0.3 omega^-1/2)");
        s.app->add_option("--kmax", s.opt->kmax, "largest spline order (default: 8 d)");
        s.app->add_option("--band", s.opt->band, "spline truncation band (default: automatic)");
    }
    {
        Subcommand& s = add("calibrate", "calibrate c0 and a0 and write the constants file", run_calibrate);
        s.app->add_option("--delta", s.opt->delta, "frame tolerance for c0");
        s.app->add_option("--seeds", s.opt->seeds, "lattices per omega for c0");
        s.app->add_option("--c0-omegas", s.opt->c0_omegas, "omega grid for c0 (default per manifold)");
        s.app->add_option("--a0-omegas", s.opt->a0_omegas, "omega grid for a0 (default per manifold)");
        s.app->add_option("--constants", s.opt->constants, "constants file to write");
    }
    add("report", "summarise the report files in the output directory", run_report);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = with_config(std::move(args), app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), exit_usage);
    } catch (const mf::Error& e) {
        return report_error("usage", e.what(), exit_usage);
    } catch (const std::exception& e) {
        return report_error("usage", e.what(), exit_usage);
    }

    for (auto& [name, s] : subs) {
        if (!s.app->parsed())
            continue;
        Options& o = *s.opt;
        o.jmin_set = s.jmin && s.jmin->count() > 0;
        o.jmax_set = s.jmax && s.jmax->count() > 0;
        Context cx{o.out, o.format == "json", echo(*s.app)};
        try {
            s.run(o, cx);
        } catch (const mf::ArgumentError& e) {
            return report_error(e.kind(), e.what(), exit_usage);
        } catch (const mf::CalibrationError& e) {
            return report_error(e.kind(), e.what(), exit_failure, e.trace());
        } catch (const mf::Error& e) {
            return report_error(e.kind(), e.what(), exit_failure);
        } catch (const std::exception& e) {
            return report_error("internal", e.what(), exit_failure);
        }
    }
    return 0;
}

#pragma once

#include "output.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mftool {

/// Every flag of every subcommand; each subcommand binds the ones it uses.
struct Options
{
    std::string manifold = "circle";
    std::uint64_t seed = 1;
    std::string out = ".";
    std::string format = "csv";
    std::string constants;      // defaults to <out>/constants-<manifold>.txt

    double omega = 100.0;
    double rho = 0.0;           // 0: derive from the calibrated constants
    double delta = 0.5;
    double band = 0.0;          // 0: subcommand default
    int jmin = 0;
    int jmax = 0;
    bool jmin_set = false;
    bool jmax_set = false;
    int kmax = 0;               // 0: 8 d
    int samples = 20;
    int seeds = 3;
    std::string points;         // lattice CSV for pp-bounds
    std::string input;          // coefficient CSV
    std::string reference;      // function CSV to compare against
    std::vector<double> c0_omegas;
    std::vector<double> a0_omegas;
};

struct Context
{
    std::filesystem::path out;
    bool json = false;
    KeyValues config; // echoed into every file
};

void run_basis(const Options& o, const Context& cx);
void run_lattice(const Options& o, const Context& cx);
void run_pp_bounds(const Options& o, const Context& cx);
void run_frame(const Options& o, const Context& cx);
void run_decompose(const Options& o, const Context& cx);
void run_reconstruct(const Options& o, const Context& cx);
void run_cubature(const Options& o, const Context& cx);
void run_parseval(const Options& o, const Context& cx);
void run_spline(const Options& o, const Context& cx);
void run_calibrate(const Options& o, const Context& cx);
void run_report(const Options& o, const Context& cx);

} // namespace mftool

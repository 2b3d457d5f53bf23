#pragma once

#include "mf/spectral.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace mf {

/// One step of the splitmix64 generator.
constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-stage seed: splitmix64 over the global seed mixed with an FNV-1a hash
/// of the stage label and a numeric sub-index.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage, std::uint64_t index = 0)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : stage) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = seed ^ h;
    splitmix64(s);
    s ^= index * 0xd6e8feb86659fd93ULL;
    return splitmix64(s);
}

using Rng = std::mt19937_64;

/// Random function with i.i.d. standard normal coefficients on the modes with
/// eigenvalue <= band (the basis must hold them). Kernel modes are zero when
/// `zero_mean` is set.
inline SpectralFunction random_function(BasisPtr basis, double band, Rng& rng, bool zero_mean = false)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
    const std::size_t n = basis->count_upto(band);
    for (std::size_t m = 0; m < n; ++m) {
        const double v = nd(rng);
        if (!(zero_mean && basis->eigenvalue(m) == 0.0))
            c[static_cast<Eigen::Index>(m)] = v;
    }
    return SpectralFunction(std::move(basis), std::move(c));
}

} // namespace mf

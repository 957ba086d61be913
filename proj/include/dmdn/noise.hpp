// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/core/parallel.hpp"

namespace dmdn {

/// Additive white Gaussian noise level (8-bit intensity units) and seed.
struct NoiseSpec {
    double sigma0 = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!std::isfinite(sigma0) || sigma0 < 0.0)
            throw ContractError("noise sigma must be finite and non-negative");
    }
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Uniform in (0, 1] from the top 53 bits.
constexpr double to_unit_open_low(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

/// Seed for image `index` of a corpus run with base seed `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept { return base + index; }

/// Standard normal deviate as a pure function of (seed, row, col, channel).
/// Counter-based, so any evaluation order yields the same field.
inline double gaussian_at(std::uint64_t seed, index_t y, index_t x, int channel) noexcept {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(y));
    h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(x) << 2 | static_cast<std::uint64_t>(channel)));
    const double u1 = detail::to_unit_open_low(detail::splitmix64(h ^ 0x5851F42D4C957F2Dull));
    const double u2 = detail::to_unit_open_low(detail::splitmix64(h ^ 0x14057B7EF767814Full));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace detail {
inline void add_noise_plane(Plane& p, const NoiseSpec& spec, int channel) {
    parallel_for(0, p.height(), [&](index_t y) {
        for (index_t x = 0; x < p.width(); ++x) p(y, x) += spec.sigma0 * gaussian_at(spec.seed, y, x, channel);
    });
}
}  // namespace detail

/// x + sigma0 * z, unclipped. sigma0 == 0 returns the input unchanged.
inline CfaImage add_awgn(CfaImage cfa, const NoiseSpec& spec) {
    spec.validate();
    if (spec.sigma0 == 0.0) return cfa;
    detail::add_noise_plane(cfa.samples(), spec, 0);
    return cfa;
}

inline PlanarImage add_awgn(PlanarImage img, const NoiseSpec& spec) {
    spec.validate();
    if (spec.sigma0 == 0.0) return img;
    for (int c = 0; c < 3; ++c) detail::add_noise_plane(img[static_cast<std::size_t>(c)], spec, c);
    return img;
}

/// Anscombe transform 2*sqrt(v + 3/8).
inline double anscombe(double v) {
    if (!(v >= -0.375)) throw DomainError("Anscombe transform undefined below -3/8");
    return 2.0 * std::sqrt(v + 0.375);
}

/// Exact algebraic inverse (t/2)^2 - 3/8.
inline double anscombe_inverse(double t) noexcept { return 0.25 * t * t - 0.375; }

inline CfaImage vst_forward(CfaImage cfa) {
    for (double& v : cfa.samples().data()) v = anscombe(v);
    return cfa;
}

inline CfaImage vst_inverse(CfaImage cfa) {
    for (double& v : cfa.samples().data()) v = anscombe_inverse(v);
    return cfa;
}

}  // namespace dmdn

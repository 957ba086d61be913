// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "dmdn/core/border.hpp"
#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"

namespace dmdn {

/// Keeps, at every pixel, only the channel the pattern assigns to it.
inline CfaImage mosaic(const PlanarImage& img, BayerPattern pattern) {
    require(img.space() == ColorSpace::RGB, "mosaic expects an RGB image");
    if (img.width() % 2 != 0 || img.height() % 2 != 0)
        throw ContractError("mosaic requires even image dimensions");
    CfaImage cfa(img.width(), img.height(), pattern);
    for (index_t y = 0; y < img.height(); ++y)
        for (index_t x = 0; x < img.width(); ++x)
            cfa(y, x) = img(static_cast<std::size_t>(pattern.at(y, x)), y, x);
    return cfa;
}

/// Half-resolution four-plane view of a mosaic, planes ordered (R, G1, G2, B)
/// where G1 shares a row with R.
struct HalfSizeQuad {
    enum Plane4 : int { kR = 0, kG1 = 1, kG2 = 2, kB = 3 };

    std::array<Plane, 4> planes;
    BayerPattern pattern;

    index_t width() const noexcept { return planes[0].width(); }
    index_t height() const noexcept { return planes[0].height(); }

    static std::array<CellSite, 4> sites(BayerPattern p) noexcept {
        return {p.red_site(), p.green1_site(), p.green2_site(), p.blue_site()};
    }
};

inline HalfSizeQuad rearrange_half_size(const CfaImage& cfa) {
    const index_t hw = cfa.width() / 2, hh = cfa.height() / 2;
    HalfSizeQuad quad{{Plane(hw, hh), Plane(hw, hh), Plane(hw, hh), Plane(hw, hh)}, cfa.pattern()};
    const auto sites = HalfSizeQuad::sites(cfa.pattern());
    for (std::size_t k = 0; k < 4; ++k)
        for (index_t i = 0; i < hh; ++i)
            for (index_t j = 0; j < hw; ++j)
                quad.planes[k](i, j) = cfa(2 * i + sites[k].dy, 2 * j + sites[k].dx);
    return quad;
}

inline CfaImage recombine_half_size(const HalfSizeQuad& quad) {
    for (const auto& p : quad.planes)
        require(p.same_shape(quad.planes[0]), "quad planes must share dimensions");
    CfaImage cfa(2 * quad.width(), 2 * quad.height(), quad.pattern);
    const auto sites = HalfSizeQuad::sites(quad.pattern);
    for (std::size_t k = 0; k < 4; ++k)
        for (index_t i = 0; i < quad.height(); ++i)
            for (index_t j = 0; j < quad.width(); ++j)
                cfa(2 * i + sites[k].dy, 2 * j + sites[k].dx) = quad.planes[k](i, j);
    return cfa;
}

/// Offsets (dy, dx) of the four phase views, in view order.
inline constexpr std::array<CellSite, 4> kPhaseOffsets{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

/// View t samples the mosaic at (y + dy, x + dx), mirrored at the far
/// border, so each view presents the same scene with a different Bayer
/// alignment. View 0 is the mosaic itself.
inline std::array<Plane, 4> four_phase_views(const CfaImage& cfa) {
    const index_t w = cfa.width(), h = cfa.height();
    std::array<Plane, 4> views;
    for (std::size_t t = 0; t < 4; ++t) {
        const auto [dy, dx] = kPhaseOffsets[t];
        Plane v(w, h);
        for (index_t y = 0; y < h; ++y)
            for (index_t x = 0; x < w; ++x)
                v(y, x) = cfa(mirror_index(y + dy, h), mirror_index(x + dx, w));
        views[t] = std::move(v);
    }
    return views;
}

}  // namespace dmdn

// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dmdn/core/border.hpp"
#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/core/parallel.hpp"

namespace dmdn {

enum class DemosaickerId { Bilinear, HA, RI };

inline std::string_view to_string(DemosaickerId id) {
    switch (id) {
        case DemosaickerId::Bilinear: return "bilinear";
        case DemosaickerId::HA: return "ha";
        case DemosaickerId::RI: return "ri";
    }
    return "bilinear";
}

inline DemosaickerId parse_demosaicker(std::string_view s) {
    if (s == "bilinear") return DemosaickerId::Bilinear;
    if (s == "ha") return DemosaickerId::HA;
    if (s == "ri") return DemosaickerId::RI;
    throw ContractError("unknown demosaicker '" + std::string(s) + "'");
}

namespace detail {

/// Mirrored read of a plane.
inline double at_mirror(const Plane& p, index_t y, index_t x) noexcept {
    return p(mirror_index(y, p.height()), mirror_index(x, p.width()));
}

/// Mean of the nearest samples of channel `c` around (y, x), read from
/// `values` (which only needs to be meaningful at sites of channel c).
/// Green sites have 4 axial neighbors; red/blue have 2 axial or 4 diagonal.
inline double neighbor_mean(const Plane& values, BayerPattern pat, Channel c, index_t y, index_t x) noexcept {
    const bool horiz = pat.at(y, x - 1) == c;
    const bool vert = pat.at(y - 1, x) == c;
    if (horiz && vert)
        return 0.25 * (at_mirror(values, y, x - 1) + at_mirror(values, y, x + 1) +
                       at_mirror(values, y - 1, x) + at_mirror(values, y + 1, x));
    if (horiz) return 0.5 * (at_mirror(values, y, x - 1) + at_mirror(values, y, x + 1));
    if (vert) return 0.5 * (at_mirror(values, y - 1, x) + at_mirror(values, y + 1, x));
    return 0.25 * (at_mirror(values, y - 1, x - 1) + at_mirror(values, y - 1, x + 1) +
                   at_mirror(values, y + 1, x - 1) + at_mirror(values, y + 1, x + 1));
}

inline void require_min_size(const CfaImage& cfa, index_t n, const char* who) {
    if (cfa.width() < n || cfa.height() < n)
        throw ContractError(std::string(who) + " requires a CFA of at least " + std::to_string(n) +
                            "x" + std::to_string(n));
}

/// Fills channel c of `out` from a plane that is exact at c-sites:
/// c-sites copy the CFA, the rest get base + interpolated (value - base).
/// With base == nullptr this is plain bilinear interpolation.
inline void interpolate_difference(const CfaImage& cfa, Channel c, const Plane* base, PlanarImage& out) {
    const BayerPattern pat = cfa.pattern();
    const index_t w = cfa.width(), h = cfa.height();
    Plane diff(w, h);
    for (index_t y = 0; y < h; ++y)
        for (index_t x = 0; x < w; ++x)
            if (pat.at(y, x) == c) diff(y, x) = cfa(y, x) - (base ? (*base)(y, x) : 0.0);
    auto& dst = out[static_cast<std::size_t>(c)];
    parallel_for(0, h, [&](index_t y) {
        for (index_t x = 0; x < w; ++x) {
            if (pat.at(y, x) == c)
                dst(y, x) = cfa(y, x);
            else
                dst(y, x) = (base ? (*base)(y, x) : 0.0) + neighbor_mean(diff, pat, c, y, x);
        }
    });
}

}  // namespace detail

/// Each missing sample is the mean of its nearest same-channel neighbors.
inline PlanarImage demosaic_bilinear(const CfaImage& cfa) {
    detail::require_min_size(cfa, 4, "bilinear demosaicking");
    PlanarImage out(cfa.width(), cfa.height());
    for (Channel c : {kRed, kGreen, kBlue}) detail::interpolate_difference(cfa, c, nullptr, out);
    return out;
}

/// Direction picked by the Hamilton-Adams green step at one pixel.
enum class HaDirection : std::uint8_t { Observed, Horizontal, Vertical, Tie };

/// Hamilton-Adams green plane. At red/blue sites the gradient+Laplacian
/// scores pick the smoother axis; ties average both estimates.
inline Plane ha_green_plane(const CfaImage& cfa, std::vector<HaDirection>* directions = nullptr) {
    detail::require_min_size(cfa, 6, "Hamilton-Adams demosaicking");
    const BayerPattern pat = cfa.pattern();
    const Plane& s = cfa.samples();
    const index_t w = cfa.width(), h = cfa.height();
    Plane green(w, h);
    if (directions) directions->assign(static_cast<std::size_t>(w * h), HaDirection::Observed);
    using detail::at_mirror;
    parallel_for(0, h, [&](index_t y) {
        for (index_t x = 0; x < w; ++x) {
            if (pat.at(y, x) == kGreen) {
                green(y, x) = s(y, x);
                continue;
            }
            const double c = s(y, x);
            const double gl = at_mirror(s, y, x - 1), gr = at_mirror(s, y, x + 1);
            const double gu = at_mirror(s, y - 1, x), gd = at_mirror(s, y + 1, x);
            const double lap_h = 2.0 * c - at_mirror(s, y, x - 2) - at_mirror(s, y, x + 2);
            const double lap_v = 2.0 * c - at_mirror(s, y - 2, x) - at_mirror(s, y + 2, x);
            const double score_h = std::abs(gl - gr) + std::abs(lap_h);
            const double score_v = std::abs(gu - gd) + std::abs(lap_v);
            const double est_h = 0.5 * (gl + gr) + 0.25 * lap_h;
            const double est_v = 0.5 * (gu + gd) + 0.25 * lap_v;
            HaDirection dir;
            if (score_h < score_v) {
                green(y, x) = est_h;
                dir = HaDirection::Horizontal;
            } else if (score_v < score_h) {
                green(y, x) = est_v;
                dir = HaDirection::Vertical;
            } else {
                green(y, x) = 0.5 * (est_h + est_v);
                dir = HaDirection::Tie;
            }
            if (directions) (*directions)[static_cast<std::size_t>(y * w + x)] = dir;
        }
    });
    return green;
}

/// Hamilton-Adams: directional green, then bilinear color differences
/// R-G and B-G added back to green.
inline PlanarImage demosaic_ha(const CfaImage& cfa) {
    Plane green = ha_green_plane(cfa);
    PlanarImage out(cfa.width(), cfa.height());
    out[kGreen] = green;
    detail::interpolate_difference(cfa, kRed, &green, out);
    detail::interpolate_difference(cfa, kBlue, &green, out);
    return out;
}

struct RiParams {
    index_t radius = 2;
    double epsilon = (0.01 * 255.0) * (0.01 * 255.0);
};

namespace detail {

/// Guided filter of a sparse channel (known where mask is set) against a
/// dense guide. Window statistics use observed samples only; the linear
/// coefficients are then box-averaged over all pixels.
inline Plane masked_guided_filter(const Plane& guide, const Plane& sparse, const std::vector<char>& mask,
                                  const RiParams& params) {
    const index_t w = guide.width(), h = guide.height(), r = params.radius;
    Plane a(w, h), b(w, h);
    parallel_for(0, h, [&](index_t y) {
        for (index_t x = 0; x < w; ++x) {
            double n = 0, si = 0, sp = 0, sip = 0, sii = 0;
            for (index_t dy = -r; dy <= r; ++dy) {
                const index_t yy = mirror_index(y + dy, h);
                for (index_t dx = -r; dx <= r; ++dx) {
                    const index_t xx = mirror_index(x + dx, w);
                    if (!mask[static_cast<std::size_t>(yy * w + xx)]) continue;
                    const double gi = guide(yy, xx), pv = sparse(yy, xx);
                    n += 1;
                    si += gi;
                    sp += pv;
                    sip += gi * pv;
                    sii += gi * gi;
                }
            }
            const double mi = si / n, mp = sp / n;
            const double cov = sip / n - mi * mp;
            const double var = sii / n - mi * mi;
            a(y, x) = cov / (var + params.epsilon);
            b(y, x) = mp - a(y, x) * mi;
        }
    });
    Plane q(w, h);
    const double norm = 1.0 / static_cast<double>((2 * r + 1) * (2 * r + 1));
    parallel_for(0, h, [&](index_t y) {
        for (index_t x = 0; x < w; ++x) {
            double sa = 0, sb = 0;
            for (index_t dy = -r; dy <= r; ++dy)
                for (index_t dx = -r; dx <= r; ++dx) {
                    sa += at_mirror(a, y + dy, x + dx);
                    sb += at_mirror(b, y + dy, x + dx);
                }
            q(y, x) = sa * norm * guide(y, x) + sb * norm;
        }
    });
    return q;
}

}  // namespace detail

/// Residual interpolation: Hamilton-Adams green, then for red and blue a
/// guided-filter tentative estimate corrected by bilinearly interpolated
/// residuals.
inline PlanarImage demosaic_ri(const CfaImage& cfa, const RiParams& params = {}) {
    detail::require_min_size(cfa, 8, "residual interpolation demosaicking");
    const index_t w = cfa.width(), h = cfa.height();
    Plane green = ha_green_plane(cfa);
    PlanarImage out(w, h);
    out[kGreen] = green;
    const BayerPattern pat = cfa.pattern();
    for (Channel c : {kRed, kBlue}) {
        std::vector<char> mask(static_cast<std::size_t>(w * h), 0);
        for (index_t y = 0; y < h; ++y)
            for (index_t x = 0; x < w; ++x)
                mask[static_cast<std::size_t>(y * w + x)] = pat.at(y, x) == c;
        const Plane tentative = detail::masked_guided_filter(green, cfa.samples(), mask, params);
        detail::interpolate_difference(cfa, c, &tentative, out);
    }
    return out;
}

inline PlanarImage demosaic(const CfaImage& cfa, DemosaickerId id) {
    switch (id) {
        case DemosaickerId::Bilinear: return demosaic_bilinear(cfa);
        case DemosaickerId::HA: return demosaic_ha(cfa);
        case DemosaickerId::RI: return demosaic_ri(cfa);
    }
    throw ContractError("unknown demosaicker");
}

}  // namespace dmdn

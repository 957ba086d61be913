// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/core/parallel.hpp"

namespace dmdn {

/// Orthonormal opponent-color rotation. Row 0 is the luminance axis
/// (1,1,1)/sqrt(3); the inverse is the transpose.
inline constexpr std::array<std::array<double, 3>, 3> kIsoYuv = [] {
    constexpr double s3 = 0.57735026918962576451;  // 1/sqrt(3)
    constexpr double s2 = 0.70710678118654752440;  // 1/sqrt(2)
    constexpr double s6 = 0.40824829046386301637;  // 1/sqrt(6)
    return std::array<std::array<double, 3>, 3>{{
        {s3, s3, s3},
        {s2, 0.0, -s2},
        {s6, -2.0 * s6, s6},
    }};
}();

namespace detail {
template <bool Transpose>
PlanarImage apply_color_matrix(const PlanarImage& in, ColorSpace out_space) {
    PlanarImage out(in.width(), in.height(), out_space);
    const auto& m = kIsoYuv;
    parallel_for(0, in.height(), [&](index_t y) {
        for (index_t x = 0; x < in.width(); ++x) {
            const double a = in(0, y, x), b = in(1, y, x), c = in(2, y, x);
            for (std::size_t k = 0; k < 3; ++k) {
                if constexpr (Transpose)
                    out(k, y, x) = m[0][k] * a + m[1][k] * b + m[2][k] * c;
                else
                    out(k, y, x) = m[k][0] * a + m[k][1] * b + m[k][2] * c;
            }
        }
    });
    return out;
}
}  // namespace detail

/// Y=(R+G+B)/sqrt3, U=(R-B)/sqrt2, V=(R-2G+B)/sqrt6.
inline PlanarImage rgb_to_yuv_iso(const PlanarImage& img) {
    if (img.space() != ColorSpace::RGB) throw ContractError("rgb_to_yuv_iso expects an RGB image");
    return detail::apply_color_matrix<false>(img, ColorSpace::YUV_ISO);
}

inline PlanarImage yuv_to_rgb_iso(const PlanarImage& img) {
    if (img.space() != ColorSpace::YUV_ISO) throw ContractError("yuv_to_rgb_iso expects a YUV image");
    return detail::apply_color_matrix<true>(img, ColorSpace::RGB);
}

inline PlanarImage clip_to_range(PlanarImage img, double lo, double hi) {
    require(lo < hi, "clip range must satisfy lo < hi");
    for (auto& p : img.planes())
        for (double& v : p.data()) v = std::clamp(v, lo, hi);
    return img;
}

}  // namespace dmdn

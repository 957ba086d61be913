// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmdn/cfa.hpp"
#include "dmdn/core/border.hpp"
#include "dmdn/core/color.hpp"
#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/core/parallel.hpp"

namespace dmdn {

enum class DenoiserId { NLM_Y, DCT_YUV };

inline std::string_view to_string(DenoiserId id) { return id == DenoiserId::NLM_Y ? "nlm" : "dct"; }

inline DenoiserId parse_denoiser(std::string_view s) {
    if (s == "nlm") return DenoiserId::NLM_Y;
    if (s == "dct") return DenoiserId::DCT_YUV;
    throw ContractError("unknown denoiser '" + std::string(s) + "'");
}

/// `sigma` is the noise level handed to the denoiser, which after
/// demosaicking is factor_c * sigma0 rather than sigma0 itself.
struct DenoiserConfig {
    DenoiserId id = DenoiserId::DCT_YUV;
    double sigma = 0.0;
    index_t patch_radius = 3;
    index_t search_radius = 10;
    index_t block_size = 8;
    double nlm_h = 0.4;  // NLM filtering parameter h = nlm_h * sigma

    void validate() const {
        if (!std::isfinite(sigma) || sigma < 0.0) throw ContractError("denoiser sigma must be finite and >= 0");
        if (!std::isfinite(nlm_h) || nlm_h <= 0.0) throw ContractError("NLM h factor must be > 0");
        if (patch_radius < 1 || search_radius < 1) throw ContractError("NLM radii must be >= 1");
        if (block_size < 2) throw ContractError("DCT block size must be >= 2");
    }
};

// ---------------------------------------------------------------------------
// Non-local means
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr index_t kBandRows = 16;

/// NL-means whose patch distances are measured on `guide` only; the same
/// weights average every plane in `values`. d2 is the mean squared patch
/// difference and a candidate gets weight exp(-max(d2 - 2 sigma^2, 0) / h^2).
inline std::vector<Plane> nlm_guided(const Plane& guide, std::span<const Plane* const> values, double sigma,
                                     index_t patch_radius, index_t search_radius, double h_factor) {
    const index_t w = guide.width(), h = guide.height();
    const index_t pr = patch_radius, sr = search_radius;
    const double patch_area = static_cast<double>((2 * pr + 1) * (2 * pr + 1));
    const double hfilt = h_factor * sigma;
    const double inv_h2 = 1.0 / (hfilt * hfilt);
    const double bias = 2.0 * sigma * sigma;
    const std::size_t nch = values.size();

    std::vector<Plane> out(nch, Plane(w, h));
    const index_t bands = (h + kBandRows - 1) / kBandRows;
    // mx[c] = mirrored column of c - pr - sr, covering every column touched.
    std::vector<index_t> mx(static_cast<std::size_t>(w + 2 * (pr + sr)));
    for (std::size_t c = 0; c < mx.size(); ++c) mx[c] = mirror_index(static_cast<index_t>(c) - pr - sr, w);

    parallel_for(0, bands, [&](index_t band) {
        const index_t y0 = band * kBandRows;
        const index_t y1 = std::min(h, y0 + kBandRows);
        const index_t rows = y1 - y0;
        const index_t pw = w + 2 * pr;        // padded width of diff rows
        const index_t ph = rows + 2 * pr;     // padded height of diff rows
        std::vector<double> diff(static_cast<std::size_t>(pw * ph));
        std::vector<double> colsum(static_cast<std::size_t>(pw * rows));
        std::vector<double> wsum(static_cast<std::size_t>(w * rows), 0.0);
        std::vector<double> acc(static_cast<std::size_t>(w * rows) * nch, 0.0);

        for (index_t oy = -sr; oy <= sr; ++oy) {
            for (index_t ox = -sr; ox <= sr; ++ox) {
                for (index_t r = 0; r < ph; ++r) {
                    const index_t y = y0 - pr + r;
                    const double* ga = guide.row(mirror_index(y, h)).data();
                    const double* gb = guide.row(mirror_index(y + oy, h)).data();
                    const index_t* ca = mx.data() + sr;
                    const index_t* cb = mx.data() + sr + ox;
                    double* dr = diff.data() + r * pw;
                    for (index_t c = 0; c < pw; ++c) {
                        const double d = ga[ca[c]] - gb[cb[c]];
                        dr[c] = d * d;
                    }
                }
                for (index_t r = 0; r < rows; ++r)
                    for (index_t c = 0; c < pw; ++c) {
                        double s = 0.0;
                        for (index_t k = 0; k <= 2 * pr; ++k) s += diff[static_cast<std::size_t>((r + k) * pw + c)];
                        colsum[static_cast<std::size_t>(r * pw + c)] = s;
                    }
                for (index_t r = 0; r < rows; ++r) {
                    const index_t y = y0 + r;
                    const index_t ys = mirror_index(y + oy, h);
                    const index_t* cs = mx.data() + pr + sr + ox;
                    for (index_t x = 0; x < w; ++x) {
                        double s = 0.0;
                        for (index_t k = 0; k <= 2 * pr; ++k) s += colsum[static_cast<std::size_t>(r * pw + x + k)];
                        const double d2 = s / patch_area;
                        const double wt = std::exp(-std::max(d2 - bias, 0.0) * inv_h2);
                        const auto idx = static_cast<std::size_t>(r * w + x);
                        wsum[idx] += wt;
                        const index_t xs = cs[x];
                        for (std::size_t ch = 0; ch < nch; ++ch) acc[idx * nch + ch] += wt * (*values[ch])(ys, xs);
                    }
                }
            }
        }
        for (index_t r = 0; r < rows; ++r)
            for (index_t x = 0; x < w; ++x) {
                const auto idx = static_cast<std::size_t>(r * w + x);
                for (std::size_t ch = 0; ch < nch; ++ch) out[ch](y0 + r, x) = acc[idx * nch + ch] / wsum[idx];
            }
    });
    return out;
}

}  // namespace detail

/// Single-channel NL-means (the guide is the plane itself).
inline Plane denoise_nlm_plane(const Plane& p, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.sigma == 0.0) return p;
    const std::array<const Plane*, 1> vals{&p};
    return std::move(detail::nlm_guided(p, vals, cfg.sigma, cfg.patch_radius, cfg.search_radius, cfg.nlm_h)[0]);
}

/// Color NL-means guided by the luminance of the isometric YUV transform:
/// weights come from Y patches and are applied to Y, U and V alike.
inline PlanarImage denoise_nlm_y(const PlanarImage& img, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.id != DenoiserId::NLM_Y) throw ContractError("denoise_nlm_y called with a non-NLM config");
    if (cfg.sigma == 0.0) return img;
    const PlanarImage yuv = rgb_to_yuv_iso(img);
    const std::array<const Plane*, 3> vals{&yuv[0], &yuv[1], &yuv[2]};
    auto planes = detail::nlm_guided(yuv[0], vals, cfg.sigma, cfg.patch_radius, cfg.search_radius, cfg.nlm_h);
    PlanarImage den({std::move(planes[0]), std::move(planes[1]), std::move(planes[2])}, ColorSpace::YUV_ISO);
    return yuv_to_rgb_iso(den);
}

// ---------------------------------------------------------------------------
// Sliding-window DCT hard thresholding
// ---------------------------------------------------------------------------

namespace detail {

/// Orthonormal DCT-II basis, row k = frequency k.
inline std::vector<double> dct_matrix(index_t n) {
    std::vector<double> m(static_cast<std::size_t>(n * n));
    for (index_t k = 0; k < n; ++k) {
        const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
        for (index_t i = 0; i < n; ++i)
            m[static_cast<std::size_t>(k * n + i)] =
                alpha * std::cos(std::numbers::pi * static_cast<double>((2 * i + 1) * k) / (2.0 * static_cast<double>(n)));
    }
    return m;
}

/// Every block overlapping the image (top-left corners from -(B-1) to
/// size-1, mirrored samples outside) is transformed, thresholded and
/// inverted; each pixel therefore receives exactly B*B estimates. Blocks
/// are processed in fixed bands whose partial sums are merged in band
/// order, so the result does not depend on the worker count.
inline Plane dct_threshold_plane(const Plane& p, double threshold, index_t bs) {
    const index_t w = p.width(), h = p.height();
    const auto basis = dct_matrix(bs);
    const index_t first = -(bs - 1);
    const index_t n_block_rows = h + bs - 1;
    const index_t bands = (n_block_rows + kBandRows - 1) / kBandRows;
    const index_t acc_rows = kBandRows + bs - 1;
    const auto B = static_cast<std::size_t>(bs);

    std::vector<std::vector<double>> band_acc(static_cast<std::size_t>(bands));
    parallel_for(0, bands, [&](index_t band) {
        const index_t by0 = first + band * kBandRows;
        const index_t by1 = std::min(first + n_block_rows, by0 + kBandRows);
        auto& acc = band_acc[static_cast<std::size_t>(band)];
        acc.assign(static_cast<std::size_t>(acc_rows * w), 0.0);
        std::vector<double> blk(B * B), tmp(B * B), coef(B * B);
        for (index_t by = by0; by < by1; ++by) {
            for (index_t bx = first; bx < w; ++bx) {
                for (index_t i = 0; i < bs; ++i) {
                    const index_t yy = mirror_index(by + i, h);
                    for (index_t j = 0; j < bs; ++j) blk[i * B + j] = p(yy, mirror_index(bx + j, w));
                }
                // coef = M * blk * M^T
                for (std::size_t k = 0; k < B; ++k)
                    for (std::size_t j = 0; j < B; ++j) {
                        double s = 0.0;
                        for (std::size_t i = 0; i < B; ++i) s += basis[k * B + i] * blk[i * B + j];
                        tmp[k * B + j] = s;
                    }
                for (std::size_t k = 0; k < B; ++k)
                    for (std::size_t l = 0; l < B; ++l) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < B; ++j) s += tmp[k * B + j] * basis[l * B + j];
                        coef[k * B + l] = s;
                    }
                for (std::size_t q = 1; q < B * B; ++q)
                    if (std::abs(coef[q]) < threshold) coef[q] = 0.0;
                // blk = M^T * coef * M
                for (std::size_t i = 0; i < B; ++i)
                    for (std::size_t l = 0; l < B; ++l) {
                        double s = 0.0;
                        for (std::size_t k = 0; k < B; ++k) s += basis[k * B + i] * coef[k * B + l];
                        tmp[i * B + l] = s;
                    }
                for (std::size_t i = 0; i < B; ++i)
                    for (std::size_t j = 0; j < B; ++j) {
                        double s = 0.0;
                        for (std::size_t l = 0; l < B; ++l) s += tmp[i * B + l] * basis[l * B + j];
                        blk[i * B + j] = s;
                    }
                for (index_t i = 0; i < bs; ++i) {
                    const index_t y = by + i;
                    if (y < 0 || y >= h) continue;
                    const index_t ar = y - by0;
                    for (index_t j = 0; j < bs; ++j) {
                        const index_t x = bx + j;
                        if (x < 0 || x >= w) continue;
                        acc[static_cast<std::size_t>(ar * w + x)] += blk[static_cast<std::size_t>(i) * B + static_cast<std::size_t>(j)];
                    }
                }
            }
        }
    });

    Plane out(w, h);
    for (index_t band = 0; band < bands; ++band) {
        const index_t by0 = first + band * kBandRows;
        const auto& acc = band_acc[static_cast<std::size_t>(band)];
        for (index_t ar = 0; ar < acc_rows; ++ar) {
            const index_t y = by0 + ar;
            if (y < 0 || y >= h) continue;
            for (index_t x = 0; x < w; ++x) out(y, x) += acc[static_cast<std::size_t>(ar * w + x)];
        }
    }
    const double inv = 1.0 / static_cast<double>(bs * bs);
    for (double& v : out.data()) v *= inv;
    return out;
}

}  // namespace detail

/// Single-channel sliding DCT denoiser, threshold 3*sigma.
inline Plane denoise_dct_plane(const Plane& p, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.sigma == 0.0) return p;
    return detail::dct_threshold_plane(p, 3.0 * cfg.sigma, cfg.block_size);
}

/// Sliding DCT hard thresholding applied to each channel of the isometric
/// YUV transform.
inline PlanarImage denoise_dct_yuv(const PlanarImage& img, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.id != DenoiserId::DCT_YUV) throw ContractError("denoise_dct_yuv called with a non-DCT config");
    if (cfg.sigma == 0.0) return img;
    PlanarImage yuv = rgb_to_yuv_iso(img);
    for (auto& p : yuv.planes()) p = detail::dct_threshold_plane(p, 3.0 * cfg.sigma, cfg.block_size);
    return yuv_to_rgb_iso(yuv);
}

inline PlanarImage denoise_color(const PlanarImage& img, const DenoiserConfig& cfg) {
    return cfg.id == DenoiserId::NLM_Y ? denoise_nlm_y(img, cfg) : denoise_dct_yuv(img, cfg);
}

inline Plane denoise_plane(const Plane& p, const DenoiserConfig& cfg) {
    return cfg.id == DenoiserId::NLM_Y ? denoise_nlm_plane(p, cfg) : denoise_dct_plane(p, cfg);
}

// ---------------------------------------------------------------------------
// CFA-domain adapters
// ---------------------------------------------------------------------------

enum class CfaAdapter { HalfSize, FourPhase };

inline std::string_view to_string(CfaAdapter a) { return a == CfaAdapter::HalfSize ? "halfsize" : "fourphase"; }

inline CfaAdapter parse_adapter(std::string_view s) {
    if (s == "halfsize") return CfaAdapter::HalfSize;
    if (s == "fourphase") return CfaAdapter::FourPhase;
    throw ContractError("unknown CFA adapter '" + std::string(s) + "'");
}

/// Denoises the half-size quad as the two color images (R,G1,B) and
/// (R,G2,B); each green comes from its own image, red and blue are the
/// mean of both results.
inline CfaImage denoise_cfa_halfsize(const CfaImage& cfa, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.sigma == 0.0) return cfa;
    HalfSizeQuad quad = rearrange_half_size(cfa);
    using Q = HalfSizeQuad;
    const PlanarImage first({quad.planes[Q::kR], quad.planes[Q::kG1], quad.planes[Q::kB]}, ColorSpace::RGB);
    const PlanarImage second({quad.planes[Q::kR], quad.planes[Q::kG2], quad.planes[Q::kB]}, ColorSpace::RGB);
    const PlanarImage d1 = denoise_color(first, cfg);
    const PlanarImage d2 = denoise_color(second, cfg);
    quad.planes[Q::kG1] = d1[1];
    quad.planes[Q::kG2] = d2[1];
    for (index_t i = 0; i < quad.height(); ++i)
        for (index_t j = 0; j < quad.width(); ++j) {
            quad.planes[Q::kR](i, j) = 0.5 * (d1(0, i, j) + d2(0, i, j));
            quad.planes[Q::kB](i, j) = 0.5 * (d1(2, i, j) + d2(2, i, j));
        }
    return recombine_half_size(quad);
}

/// Denoises the four phase views as grayscale images, shifts each result
/// back and averages the estimates available at every pixel. The last
/// row/column of a shifted view has no counterpart, so border pixels
/// average over the views that cover them.
inline CfaImage denoise_cfa_fourphase(const CfaImage& cfa, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.sigma == 0.0) return cfa;
    const auto views = four_phase_views(cfa);
    std::array<Plane, 4> den;
    for (std::size_t t = 0; t < 4; ++t) den[t] = denoise_plane(views[t], cfg);
    CfaImage out(cfa.width(), cfa.height(), cfa.pattern());
    for (index_t y = 0; y < cfa.height(); ++y)
        for (index_t x = 0; x < cfa.width(); ++x) {
            double s = 0.0;
            int n = 0;
            for (std::size_t t = 0; t < 4; ++t) {
                const auto [dy, dx] = kPhaseOffsets[t];
                if (y - dy < 0 || x - dx < 0) continue;
                s += den[t](y - dy, x - dx);
                ++n;
            }
            out(y, x) = s / n;
        }
    return out;
}

inline CfaImage denoise_cfa(const CfaImage& cfa, const DenoiserConfig& cfg, CfaAdapter adapter) {
    return adapter == CfaAdapter::HalfSize ? denoise_cfa_halfsize(cfa, cfg) : denoise_cfa_fourphase(cfa, cfg);
}

}  // namespace dmdn

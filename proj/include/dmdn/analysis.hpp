// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmdn/cfa.hpp"
#include "dmdn/core/color.hpp"
#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/demosaic.hpp"
#include "dmdn/noise.hpp"

namespace dmdn {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Per-channel mean squared error over all pixels.
inline std::array<double, 3> channel_mse(const PlanarImage& a, const PlanarImage& b) {
    if (!a.same_shape(b)) throw ContractError("metric inputs differ in dimensions");
    if (a.space() != b.space()) throw ContractError("metric inputs differ in colorspace");
    std::array<double, 3> mse{};
    const auto n = static_cast<double>(a.width() * a.height());
    for (std::size_t c = 0; c < 3; ++c) {
        const auto pa = a[c].data(), pb = b[c].data();
        double s = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const double d = pa[i] - pb[i];
            s += d * d;
        }
        mse[c] = s / n;
    }
    return mse;
}

/// 10 log10(255^2 / mean channel MSE). Identical images give +infinity.
inline double cpsnr(const PlanarImage& a, const PlanarImage& b) {
    const auto mse = channel_mse(a, b);
    const double mean = (mse[0] + mse[1] + mse[2]) / 3.0;
    if (mean == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mean);
}

inline double rmse(const PlanarImage& a, const PlanarImage& b) {
    const auto mse = channel_mse(a, b);
    return std::sqrt((mse[0] + mse[1] + mse[2]) / 3.0);
}

// ---------------------------------------------------------------------------
// Demosaicked noise
// ---------------------------------------------------------------------------

/// Signed residual of a restoration against its ground truth.
struct NoiseField {
    PlanarImage field;

    index_t width() const noexcept { return field.width(); }
    index_t height() const noexcept { return field.height(); }
};

inline NoiseField difference(const PlanarImage& estimate, const PlanarImage& truth) {
    if (!estimate.same_shape(truth)) throw ContractError("difference of images with different dimensions");
    PlanarImage d(estimate.width(), estimate.height(), estimate.space());
    for (std::size_t c = 0; c < 3; ++c) {
        const auto pe = estimate[c].data(), pt = truth[c].data();
        auto pd = d[c].data();
        for (std::size_t i = 0; i < pd.size(); ++i) pd[i] = pe[i] - pt[i];
    }
    return {std::move(d)};
}

/// demosaic(mosaic(gt) + AWGN) - gt, unclipped, in RGB.
inline NoiseField demosaicked_noise(const PlanarImage& gt, BayerPattern pattern, const NoiseSpec& spec,
                                    DemosaickerId dm) {
    const CfaImage noisy = add_awgn(mosaic(gt, pattern), spec);
    return difference(demosaic(noisy, dm), gt);
}

// ---------------------------------------------------------------------------
// Covariance statistics
// ---------------------------------------------------------------------------

/// Offsets (s, t): s rows down, t columns right, in table column order.
inline constexpr std::array<CellSite, 9> kCovOffsets{{
    {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2},
}};

struct SpatialCovTable {
    ColorSpace space = ColorSpace::RGB;
    std::array<std::array<double, 9>, 3> cov{};
    /// Empty when the channel has zero variance.
    std::array<std::optional<std::array<double, 9>>, 3> corr;

    std::array<std::string, 3> channel_names() const {
        if (space == ColorSpace::RGB) return {"R", "G", "B"};
        return {"Y", "U", "V"};
    }
};

namespace detail {
inline double plane_mean(const Plane& p) {
    double s = 0.0;
    for (double v : p.data()) s += v;
    return s / static_cast<double>(p.size());
}
inline bool negligible_variance(double var, double mean) {
    return !(var > 1e-20 * std::max(1.0, mean * mean));
}
}  // namespace detail

/// Mean-subtracted covariance between (i, j) and (i+s, j+t), averaged over
/// the pixel pairs that fall inside the field (no padding).
inline SpatialCovTable spatial_covariance(const NoiseField& nf, ColorSpace space) {
    if (nf.width() < 64 || nf.height() < 64) throw ContractError("spatial covariance needs a field of at least 64x64");
    PlanarImage f = nf.field;
    f.set_space(ColorSpace::RGB);
    if (space == ColorSpace::YUV_ISO) f = rgb_to_yuv_iso(f);
    SpatialCovTable t;
    t.space = space;
    const index_t w = f.width(), h = f.height();
    for (std::size_t c = 0; c < 3; ++c) {
        const Plane& p = f[c];
        const double mu = detail::plane_mean(p);
        for (std::size_t k = 0; k < kCovOffsets.size(); ++k) {
            const auto [s, o] = kCovOffsets[k];
            double acc = 0.0;
            for (index_t i = 0; i + s < h; ++i)
                for (index_t j = 0; j + o < w; ++j) acc += (p(i, j) - mu) * (p(i + s, j + o) - mu);
            t.cov[c][k] = acc / static_cast<double>((h - s) * (w - o));
        }
        if (!detail::negligible_variance(t.cov[c][0], mu)) {
            std::array<double, 9> r{};
            for (std::size_t k = 0; k < 9; ++k) r[k] = t.cov[c][k] / t.cov[c][0];
            t.corr[c] = r;
        }
    }
    return t;
}

struct ChannelCovMatrix {
    std::array<std::array<double, 3>, 3> cov{};
    /// Entries involving a zero-variance channel are NaN.
    std::array<std::array<double, 3>, 3> corr{};
    std::array<bool, 3> degenerate{};

    bool any_degenerate() const noexcept { return degenerate[0] || degenerate[1] || degenerate[2]; }
};

/// Cross-channel covariance with all pixels pooled (normalized by the pixel
/// count, matching the zero-offset entries of the spatial table).
inline ChannelCovMatrix channel_covariance(const NoiseField& nf) {
    if (nf.width() < 64 || nf.height() < 64) throw ContractError("channel covariance needs a field of at least 64x64");
    const auto& f = nf.field;
    const auto n = static_cast<double>(f.width() * f.height());
    std::array<double, 3> mu{};
    for (std::size_t c = 0; c < 3; ++c) mu[c] = detail::plane_mean(f[c]);
    ChannelCovMatrix m;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a; b < 3; ++b) {
            const auto pa = f[a].data(), pb = f[b].data();
            double s = 0.0;
            for (std::size_t i = 0; i < pa.size(); ++i) s += (pa[i] - mu[a]) * (pb[i] - mu[b]);
            m.cov[a][b] = m.cov[b][a] = s / n;
        }
    for (std::size_t c = 0; c < 3; ++c) m.degenerate[c] = detail::negligible_variance(m.cov[c][c], mu[c]);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            if (m.degenerate[a] || m.degenerate[b])
                m.corr[a][b] = std::numeric_limits<double>::quiet_NaN();
            else
                m.corr[a][b] = a == b ? 1.0 : m.cov[a][b] / std::sqrt(m.cov[a][a] * m.cov[b][b]);
        }
    return m;
}

// ---------------------------------------------------------------------------
// Corpus tables
// ---------------------------------------------------------------------------

struct RmseRow {
    double sigma0;
    double mean_rmse;
    std::vector<double> per_image;
};

/// Mean demosaicked-noise RMSE for each noise level. Image k of the
/// corpus uses seed derive_seed(seed, k) at every level.
inline std::vector<RmseRow> rmse_vs_sigma_table(std::span<const PlanarImage> corpus, DemosaickerId dm,
                                                std::span<const double> sigmas, BayerPattern pattern = {},
                                                std::uint64_t seed = 0) {
    if (corpus.empty() || sigmas.empty()) throw ContractError("rmse table needs images and noise levels");
    std::vector<RmseRow> rows;
    for (double s : sigmas) {
        RmseRow row{s, 0.0, {}};
        for (std::size_t k = 0; k < corpus.size(); ++k) {
            const NoiseField nf = demosaicked_noise(corpus[k], pattern, {s, derive_seed(seed, k)}, dm);
            const PlanarImage zero(nf.width(), nf.height(), nf.field.space());
            row.per_image.push_back(rmse(nf.field, zero));
        }
        double acc = 0.0;
        for (double v : row.per_image) acc += v;
        row.mean_rmse = acc / static_cast<double>(row.per_image.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Checkerboard statistic
// ---------------------------------------------------------------------------

/// Mean residual (estimate - truth) of each 2x2 phase, minus the overall
/// mean residual, in raster phase order. A 2x2-periodic artifact shows up
/// as a large entry. This is a local operationalization of the artifact,
/// not an established metric.
inline std::array<double, 4> phase_mean_offsets(const Plane& estimate, const Plane& truth) {
    if (!estimate.same_shape(truth)) throw ContractError("phase offsets of planes with different dimensions");
    std::array<double, 4> sum{};
    std::array<double, 4> cnt{};
    double total = 0.0;
    for (index_t y = 0; y < estimate.height(); ++y)
        for (index_t x = 0; x < estimate.width(); ++x) {
            const auto k = static_cast<std::size_t>((y & 1) * 2 + (x & 1));
            const double d = estimate(y, x) - truth(y, x);
            sum[k] += d;
            cnt[k] += 1.0;
            total += d;
        }
    const double mean = total / static_cast<double>(estimate.size());
    std::array<double, 4> off{};
    for (std::size_t k = 0; k < 4; ++k) off[k] = sum[k] / cnt[k] - mean;
    return off;
}

/// Disagreement between the mean residuals of the two green phases of a
/// mosaic. This is the part of the phase offsets that demosaicking turns
/// into a 2x2 pattern; a per-color bias of red or blue becomes a color
/// shift instead and is not counted.
inline double checkerboard_amplitude(const CfaImage& estimate, const CfaImage& truth) {
    if (estimate.pattern() != truth.pattern()) throw ContractError("checkerboard of mosaics with different patterns");
    const auto off = phase_mean_offsets(estimate.samples(), truth.samples());
    auto index = [](CellSite s) { return static_cast<std::size_t>(s.dy * 2 + s.dx); };
    const BayerPattern p = estimate.pattern();
    return std::abs(off[index(p.green1_site())] - off[index(p.green2_site())]);
}

}  // namespace dmdn

// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dmdn/analysis.hpp"
#include "dmdn/denoise.hpp"
#include "dmdn/noise.hpp"
#include "test_support.hpp"

namespace dmdn {
namespace {

DenoiserConfig config(DenoiserId id, double sigma) {
    DenoiserConfig c;
    c.id = id;
    c.sigma = sigma;
    return c;
}

constexpr DenoiserId kBoth[] = {DenoiserId::NLM_Y, DenoiserId::DCT_YUV};
constexpr CfaAdapter kAdapters[] = {CfaAdapter::HalfSize, CfaAdapter::FourPhase};

index_t reflect(index_t i, index_t n) {
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
}

/// Direct per-pixel NL-means: explicit patch loops, no running sums.
Plane nlm_oracle(const Plane& p, double sigma, index_t pr, index_t sr, double hk) {
    const index_t w = p.width(), h = p.height();
    const double hh = hk * sigma;
    Plane out(w, h);
    auto at = [&](index_t y, index_t x) { return p(reflect(y, h), reflect(x, w)); };
    for (index_t y = 0; y < h; ++y)
        for (index_t x = 0; x < w; ++x) {
            double num = 0.0, den = 0.0;
            for (index_t oy = -sr; oy <= sr; ++oy)
                for (index_t ox = -sr; ox <= sr; ++ox) {
                    double d2 = 0.0;
                    for (index_t a = -pr; a <= pr; ++a)
                        for (index_t b = -pr; b <= pr; ++b) {
                            const double d = at(y + a, x + b) - at(y + oy + a, x + ox + b);
                            d2 += d * d;
                        }
                    d2 /= static_cast<double>((2 * pr + 1) * (2 * pr + 1));
                    const double wt = std::exp(-std::max(d2 - 2.0 * sigma * sigma, 0.0) / (hh * hh));
                    num += wt * at(y + oy, x + ox);
                    den += wt;
                }
            out(y, x) = num / den;
        }
    return out;
}

/// Direct sliding-window DCT: every n x n block overlapping the plane,
/// transformed with the cosine formula, hard-thresholded, inverted and
/// averaged with uniform weights.
Plane dct_oracle(const Plane& p, double thr, index_t n) {
    const index_t w = p.width(), h = p.height();
    Plane sum(w, h), cnt(w, h);
    auto basis = [&](index_t k, index_t i) {
        const double a = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
        return a * std::cos(std::numbers::pi * static_cast<double>((2 * i + 1) * k) / (2.0 * static_cast<double>(n)));
    };
    std::vector<double> blk(static_cast<std::size_t>(n * n)), coef(blk.size());
    for (index_t by = -(n - 1); by < h; ++by)
        for (index_t bx = -(n - 1); bx < w; ++bx) {
            for (index_t i = 0; i < n; ++i)
                for (index_t j = 0; j < n; ++j)
                    blk[static_cast<std::size_t>(i * n + j)] = p(reflect(by + i, h), reflect(bx + j, w));
            for (index_t u = 0; u < n; ++u)
                for (index_t v = 0; v < n; ++v) {
                    double s = 0.0;
                    for (index_t i = 0; i < n; ++i)
                        for (index_t j = 0; j < n; ++j)
                            s += basis(u, i) * basis(v, j) * blk[static_cast<std::size_t>(i * n + j)];
                    coef[static_cast<std::size_t>(u * n + v)] = (u == 0 && v == 0) || std::abs(s) >= thr ? s : 0.0;
                }
            for (index_t i = 0; i < n; ++i)
                for (index_t j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (index_t u = 0; u < n; ++u)
                        for (index_t v = 0; v < n; ++v)
                            s += basis(u, i) * basis(v, j) * coef[static_cast<std::size_t>(u * n + v)];
                    const index_t y = by + i, x = bx + j;
                    if (y >= 0 && y < h && x >= 0 && x < w) {
                        sum(y, x) += s;
                        cnt(y, x) += 1.0;
                    }
                }
        }
    for (index_t y = 0; y < h; ++y)
        for (index_t x = 0; x < w; ++x) sum(y, x) /= cnt(y, x);
    return sum;
}

PlanarImage noisy_flat(index_t n, double value, double sigma, std::uint64_t seed) {
    return add_awgn(PlanarImage(n, n, ColorSpace::RGB, value), {sigma, seed});
}

TEST(DenoiserConfig, NamesAndValidation) {
    for (DenoiserId id : kBoth) EXPECT_EQ(parse_denoiser(to_string(id)), id);
    for (CfaAdapter a : kAdapters) EXPECT_EQ(parse_adapter(to_string(a)), a);
    EXPECT_THROW(parse_denoiser("bm3d"), ContractError);
    EXPECT_THROW(parse_adapter("quad"), ContractError);
    DenoiserConfig c;
    c.sigma = -1.0;
    EXPECT_THROW(c.validate(), ContractError);
    c.sigma = 1.0;
    c.patch_radius = 0;
    EXPECT_THROW(c.validate(), ContractError);
    c.patch_radius = 3;
    c.nlm_h = 0.0;
    EXPECT_THROW(c.validate(), ContractError);
}

TEST(Nlm, MatchesDirectOracle) {
    std::mt19937_64 rng(12);
    const Plane p = testing::random_plane(14, 11, rng);
    DenoiserConfig c = config(DenoiserId::NLM_Y, 30.0);
    c.patch_radius = 2;
    c.search_radius = 4;
    const Plane got = denoise_nlm_plane(p, c);
    const Plane want = nlm_oracle(p, 30.0, 2, 4, c.nlm_h);
    for (index_t y = 0; y < p.height(); ++y)
        for (index_t x = 0; x < p.width(); ++x) EXPECT_NEAR(got(y, x), want(y, x), 1e-9);
}

TEST(Nlm, ColorVersionUsesLuminanceWeightsForAllChannels) {
    std::mt19937_64 rng(13);
    const PlanarImage img = testing::random_image(12, 12, rng);
    DenoiserConfig c = config(DenoiserId::NLM_Y, 25.0);
    c.patch_radius = 1;
    c.search_radius = 3;
    const PlanarImage out = denoise_nlm_y(img, c);
    // The luminance of the result is plain NL-means of the luminance.
    const PlanarImage yuv = rgb_to_yuv_iso(img);
    const Plane y_only = denoise_nlm_plane(yuv[0], c);
    const PlanarImage out_yuv = rgb_to_yuv_iso(out);
    for (index_t y = 0; y < 12; ++y)
        for (index_t x = 0; x < 12; ++x) EXPECT_NEAR(out_yuv(0, y, x), y_only(y, x), 1e-9);
}

TEST(Dct, MatchesDirectOracle) {
    std::mt19937_64 rng(14);
    const Plane p = testing::random_plane(13, 10, rng);
    DenoiserConfig c = config(DenoiserId::DCT_YUV, 15.0);
    c.block_size = 4;
    const Plane got = denoise_dct_plane(p, c);
    const Plane want = dct_oracle(p, 45.0, 4);
    for (index_t y = 0; y < p.height(); ++y)
        for (index_t x = 0; x < p.width(); ++x) EXPECT_NEAR(got(y, x), want(y, x), 1e-9);
}

TEST(Dct, BasisIsOrthonormal) {
    const auto m = detail::dct_matrix(8);
    for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t b = 0; b < 8; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < 8; ++i) s += m[a * 8 + i] * m[b * 8 + i];
            EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-14);
        }
}

TEST(Denoise, ZeroSigmaIsIdentity) {
    std::mt19937_64 rng(15);
    const PlanarImage img = testing::random_image(20, 18, rng);
    const CfaImage cfa = testing::random_cfa(20, 18, BayerPattern::Phase::BGGR, rng);
    for (DenoiserId id : kBoth) {
        EXPECT_EQ(denoise_color(img, config(id, 0.0)), img);
        EXPECT_EQ(denoise_plane(img[0], config(id, 0.0)), img[0]);
        for (CfaAdapter a : kAdapters) EXPECT_EQ(denoise_cfa(cfa, config(id, 0.0), a), cfa);
    }
    // Running the DCT round trip with a zero threshold reproduces the input.
    const Plane rt = detail::dct_threshold_plane(img[1], 0.0, 8);
    for (index_t y = 0; y < 18; ++y)
        for (index_t x = 0; x < 20; ++x) EXPECT_NEAR(rt(y, x), img(1, y, x), 1e-6);
}

TEST(Denoise, ConstantImagesAreUnchanged) {
    const PlanarImage img(24, 24, ColorSpace::RGB, 61.0);
    const CfaImage cfa(24, 24, BayerPattern{}, 200.0);
    for (DenoiserId id : kBoth) {
        const PlanarImage out = denoise_color(img, config(id, 20.0));
        for (std::size_t c = 0; c < 3; ++c)
            for (double v : out[c].data()) EXPECT_NEAR(v, 61.0, 1e-9);
        for (CfaAdapter a : kAdapters) {
            const CfaImage o = denoise_cfa(cfa, config(id, 20.0), a);
            for (double v : o.samples().data()) EXPECT_NEAR(v, 200.0, 1e-9);
        }
    }
}

// NL-means on a flat region approaches the window mean.
TEST(Nlm, FlatPatchResidualIsSmall) {
    const PlanarImage noisy = noisy_flat(64, 128.0, 20.0, 5);
    const PlanarImage out = denoise_nlm_y(noisy, config(DenoiserId::NLM_Y, 20.0));
    EXPECT_LT(rmse(out, PlanarImage(64, 64, ColorSpace::RGB, 128.0)), 6.0);
}

// A 3-sigma hard threshold removes nearly all Gaussian coefficients.
TEST(Dct, RemovesMostNoiseEnergy) {
    const PlanarImage noisy = noisy_flat(64, 0.0, 20.0, 6);
    const PlanarImage out = denoise_dct_yuv(noisy, config(DenoiserId::DCT_YUV, 20.0));
    for (std::size_t c = 0; c < 3; ++c) EXPECT_LT(testing::plane_variance(out[c]), 40.0);
}

TEST(Denoise, ReducesVarianceOfPureNoise) {
    const PlanarImage noisy = noisy_flat(48, 100.0, 15.0, 7);
    for (DenoiserId id : kBoth) {
        const PlanarImage out = denoise_color(noisy, config(id, 15.0));
        for (std::size_t c = 0; c < 3; ++c)
            EXPECT_LT(testing::plane_variance(out[c]), testing::plane_variance(noisy[c])) << to_string(id);
    }
}

TEST(Denoise, GreyInputStaysGrey) {
    Plane g = add_awgn(CfaImage(32, 32, BayerPattern{}, 90.0), {20.0, 8}).samples();
    const PlanarImage grey({g, g, g}, ColorSpace::RGB);
    for (DenoiserId id : kBoth) {
        const PlanarImage out = denoise_color(grey, config(id, 20.0));
        for (index_t y = 0; y < 32; ++y)
            for (index_t x = 0; x < 32; ++x) {
                EXPECT_NEAR(out(0, y, x), out(1, y, x), 1e-9);
                EXPECT_NEAR(out(2, y, x), out(1, y, x), 1e-9);
            }
    }
}

TEST(Denoise, RejectsMismatchedIds) {
    const PlanarImage img(8, 8);
    EXPECT_THROW(denoise_nlm_y(img, config(DenoiserId::DCT_YUV, 1.0)), ContractError);
    EXPECT_THROW(denoise_dct_yuv(img, config(DenoiserId::NLM_Y, 1.0)), ContractError);
}

CfaImage natural_cfa() {
    return mosaic(testing::crop(testing::load_named("coffee"), 200, 100, 96, 96), BayerPattern{});
}

TEST(CfaAdapters, ReduceMosaicNoise) {
    const CfaImage clean = natural_cfa();
    const CfaImage noisy = add_awgn(clean, {20.0, 9});
    auto cfa_rmse = [](const CfaImage& a, const CfaImage& b) {
        double s = 0.0;
        for (index_t y = 0; y < a.height(); ++y)
            for (index_t x = 0; x < a.width(); ++x) s += (a(y, x) - b(y, x)) * (a(y, x) - b(y, x));
        return std::sqrt(s / static_cast<double>(a.width() * a.height()));
    };
    const double before = cfa_rmse(noisy, clean);
    for (DenoiserId id : kBoth)
        for (CfaAdapter a : kAdapters) {
            const CfaImage out = denoise_cfa(noisy, config(id, 20.0), a);
            EXPECT_LT(cfa_rmse(out, clean), before) << to_string(id) << " " << to_string(a);
        }
}

TEST(CfaAdapters, FourPhaseHasNoCheckerboardOffsets) {
    const CfaImage clean = natural_cfa();
    const CfaImage noisy = add_awgn(clean, {20.0, 10});
    for (DenoiserId id : kBoth) {
        const CfaImage out = denoise_cfa_fourphase(noisy, config(id, 20.0));
        EXPECT_LE(checkerboard_amplitude(out, clean), 1.0) << to_string(id);
    }
}

// Half-size keeps each green plane's own result and averages red/blue of
// the two color images; with identical greens the two images coincide
// and the quad is the plain color denoising of (R, G, B).
TEST(CfaAdapters, HalfSizeWithEqualGreensEqualsColorDenoising) {
    std::mt19937_64 rng(16);
    const Plane r = testing::random_plane(10, 8, rng), g = testing::random_plane(10, 8, rng),
                b = testing::random_plane(10, 8, rng);
    HalfSizeQuad q{{r, g, g, b}, BayerPattern::Phase::GRBG};
    const CfaImage cfa = recombine_half_size(q);
    const auto cfg = config(DenoiserId::DCT_YUV, 10.0);
    const HalfSizeQuad out = rearrange_half_size(denoise_cfa_halfsize(cfa, cfg));
    const PlanarImage ref = denoise_color(PlanarImage({r, g, b}, ColorSpace::RGB), cfg);
    for (index_t y = 0; y < 8; ++y)
        for (index_t x = 0; x < 10; ++x) {
            EXPECT_NEAR(out.planes[0](y, x), ref(0, y, x), 1e-12);
            EXPECT_NEAR(out.planes[1](y, x), ref(1, y, x), 1e-12);
            EXPECT_NEAR(out.planes[2](y, x), ref(1, y, x), 1e-12);
            EXPECT_NEAR(out.planes[3](y, x), ref(2, y, x), 1e-12);
        }
}

TEST(Denoise, DeterministicAcrossThreadCounts) {
    testing::ThreadCountGuard guard;
    const PlanarImage noisy = noisy_flat(40, 120.0, 20.0, 11);
    const CfaImage cfa = add_awgn(CfaImage(40, 40, BayerPattern{}, 80.0), {20.0, 12});
    for (DenoiserId id : kBoth) {
        set_thread_count(1);
        const PlanarImage ref = denoise_color(noisy, config(id, 20.0));
        const CfaImage ref4 = denoise_cfa(cfa, config(id, 20.0), CfaAdapter::FourPhase);
        for (unsigned t : {2u, 8u}) {
            set_thread_count(t);
            EXPECT_EQ(denoise_color(noisy, config(id, 20.0)), ref);
            EXPECT_EQ(denoise_cfa(cfa, config(id, 20.0), CfaAdapter::FourPhase), ref4);
        }
    }
}

}  // namespace
}  // namespace dmdn

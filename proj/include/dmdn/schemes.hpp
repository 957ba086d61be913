// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmdn/analysis.hpp"
#include "dmdn/cfa.hpp"
#include "dmdn/core/color.hpp"
#include "dmdn/core/error.hpp"
#include "dmdn/demosaic.hpp"
#include "dmdn/denoise.hpp"
#include "dmdn/noise.hpp"

namespace dmdn {

enum class SchemeOrder { DenoiseThenDemosaic, DemosaicThenDenoise };

inline std::string_view to_string(SchemeOrder o) {
    return o == SchemeOrder::DenoiseThenDemosaic ? "dn-dm" : "dm-dn";
}

inline SchemeOrder parse_order(std::string_view s) {
    if (s == "dn-dm") return SchemeOrder::DenoiseThenDemosaic;
    if (s == "dm-dn") return SchemeOrder::DemosaicThenDenoise;
    throw ContractError("unknown scheme order '" + std::string(s) + "'");
}

/// One restoration pipeline. `denoiser.sigma` is ignored: DN&DM denoises
/// the raw mosaic at sigma0, DM&DN denoises the demosaicked image at
/// factor_c * sigma0.
struct SchemeConfig {
    SchemeOrder order = SchemeOrder::DemosaicThenDenoise;
    DemosaickerId demosaicker = DemosaickerId::HA;
    DenoiserConfig denoiser{};
    CfaAdapter cfa_adapter = CfaAdapter::HalfSize;
    BayerPattern pattern{};
    double sigma0 = 0.0;
    double factor_c = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!std::isfinite(sigma0) || sigma0 < 0.0) throw ContractError("sigma0 must be finite and >= 0");
        if (!std::isfinite(factor_c) || factor_c <= 0.0) throw ContractError("factor C must be > 0");
        DenoiserConfig d = denoiser;
        d.sigma = 0.0;
        d.validate();
    }

    DenoiserConfig denoiser_at(double sigma) const {
        DenoiserConfig d = denoiser;
        d.sigma = sigma;
        return d;
    }
};

struct SchemeResult {
    PlanarImage restored;
    double cpsnr;
};

/// Mosaic, add AWGN, then restore in the configured order. The restored
/// image is clipped to [0, 255] before scoring.
inline SchemeResult run_scheme(const PlanarImage& ground_truth, const SchemeConfig& cfg) {
    cfg.validate();
    const CfaImage noisy = add_awgn(mosaic(ground_truth, cfg.pattern), {cfg.sigma0, cfg.seed});
    PlanarImage restored;
    if (cfg.order == SchemeOrder::DenoiseThenDemosaic) {
        restored = demosaic(denoise_cfa(noisy, cfg.denoiser_at(cfg.sigma0), cfg.cfa_adapter), cfg.demosaicker);
    } else {
        restored = denoise_color(demosaic(noisy, cfg.demosaicker), cfg.denoiser_at(cfg.factor_c * cfg.sigma0));
    }
    restored = clip_to_range(std::move(restored), 0.0, 255.0);
    const double score = cpsnr(restored, ground_truth);
    return {std::move(restored), score};
}

struct SweepRow {
    double factor_c;
    double mean_cpsnr;
    std::vector<double> per_image;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    /// Index of the first row with the highest mean CPSNR.
    std::size_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].mean_cpsnr > rows[best].mean_cpsnr) best = i;
        return best;
    }
};

/// DM&DN at each factor C. Image k uses seed derive_seed(base.seed, k) for
/// every factor, so all rows see the same noisy mosaic; the demosaicked
/// image is computed once per image and reused.
inline SweepResult sweep_factor(std::span<const PlanarImage> corpus, const SchemeConfig& base,
                                std::span<const double> factors) {
    if (corpus.empty()) throw ContractError("factor sweep needs a non-empty corpus");
    if (factors.empty()) throw ContractError("factor sweep needs at least one factor");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (!(factors[i] > 0.0)) throw ContractError("factors must be > 0");
        if (i > 0 && !(factors[i] > factors[i - 1])) throw ContractError("factors must be strictly increasing");
    }
    SchemeConfig cfg = base;
    cfg.order = SchemeOrder::DemosaicThenDenoise;
    cfg.validate();

    SweepResult result;
    for (double f : factors) result.rows.push_back({f, 0.0, {}});
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const CfaImage noisy = add_awgn(mosaic(corpus[k], cfg.pattern), {cfg.sigma0, derive_seed(cfg.seed, k)});
        const PlanarImage demosaicked = demosaic(noisy, cfg.demosaicker);
        for (auto& row : result.rows) {
            PlanarImage restored = denoise_color(demosaicked, cfg.denoiser_at(row.factor_c * cfg.sigma0));
            restored = clip_to_range(std::move(restored), 0.0, 255.0);
            row.per_image.push_back(cpsnr(restored, corpus[k]));
        }
    }
    for (auto& row : result.rows) {
        double acc = 0.0;
        for (double v : row.per_image) acc += v;
        row.mean_cpsnr = acc / static_cast<double>(row.per_image.size());
    }
    return result;
}

/// Factors lo, lo+step, ... up to hi inclusive, each rounded to 1e-9 so
/// that 1.0:1.9:0.1 yields exactly ten values.
inline std::vector<double> factor_range(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo) || !(lo > 0.0)) throw ContractError("invalid factor range");
    std::vector<double> out;
    for (long k = 0;; ++k) {
        const double v = lo + static_cast<double>(k) * step;
        if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
        out.push_back(std::round(v * 1e9) / 1e9);
    }
    return out;
}

}  // namespace dmdn

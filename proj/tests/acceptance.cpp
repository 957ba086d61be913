// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Sweeps and noise statistics use the bundled corpus in
// tests/data (five natural images, at least 256x256 each).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmdn/dmdn.hpp"
#include "test_support.hpp"

namespace {

using namespace dmdn;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

constexpr std::uint64_t kSeed = 1;
constexpr double kSigma = 20.0;

const std::vector<PlanarImage>& corpus() {
    static const std::vector<PlanarImage> images = testing::load_corpus();
    return images;
}

// ---------------------------------------------------------------------------
// 1-2: factor sweep
// ---------------------------------------------------------------------------

struct SweepPair {
    SweepResult dct, nlm;
};

const SweepPair& sweeps() {
    static const SweepPair s = [] {
        SchemeConfig c;
        c.order = SchemeOrder::DemosaicThenDenoise;
        c.demosaicker = DemosaickerId::HA;
        c.sigma0 = kSigma;
        c.seed = kSeed;
        const auto factors = factor_range(1.0, 1.9, 0.1);
        SweepPair out;
        c.denoiser.id = DenoiserId::DCT_YUV;
        out.dct = sweep_factor(corpus(), c, factors);
        c.denoiser.id = DenoiserId::NLM_Y;
        out.nlm = sweep_factor(corpus(), c, factors);
        return out;
    }();
    return s;
}

std::string sweep_summary(const char* name, const SweepResult& r) {
    std::string s = std::string(name) + " [";
    for (std::size_t i = 0; i < r.rows.size(); ++i) s += (i ? " " : "") + fmt(r.rows[i].mean_cpsnr, 2);
    return s + "]";
}

Outcome criterion1() {
    bool pass = true;
    std::string detail;
    for (const auto& [name, r] : {std::pair{"dct", &sweeps().dct}, std::pair{"nlm", &sweeps().nlm}}) {
        const std::size_t best = r->argmax();
        const double c = r->rows[best].factor_c;
        const double gain = r->rows[best].mean_cpsnr - r->rows[0].mean_cpsnr;
        const bool ok = c >= 1.3 - 1e-9 && c <= 1.8 + 1e-9 && gain >= 0.3;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : "; ") + name + " argmax C=" + fmt(c, 1) + " gain " + fmt(gain, 3) +
                  " dB over C=1.0";
    }
    return {pass, detail};
}

/// Local maxima other than the global one must stay below max - 0.05 dB.
bool unimodal(const SweepResult& r, double* worst) {
    const std::size_t best = r.argmax();
    const double top = r.rows[best].mean_cpsnr;
    *worst = -std::numeric_limits<double>::infinity();
    const std::size_t n = r.rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == best) continue;
        const double v = r.rows[i].mean_cpsnr;
        const bool left = i == 0 || v >= r.rows[i - 1].mean_cpsnr;
        const bool right = i + 1 == n || v >= r.rows[i + 1].mean_cpsnr;
        if (left && right) *worst = std::max(*worst, v);
    }
    return !(*worst > top - 0.05);
}

Outcome criterion2() {
    double wd = 0.0, wn = 0.0;
    const bool a = unimodal(sweeps().dct, &wd);
    const bool b = unimodal(sweeps().nlm, &wn);
    auto secondary = [](double w) { return std::isinf(w) ? std::string("none") : fmt(w, 3); };
    return {a && b, sweep_summary("dct", sweeps().dct) + " secondary max " + secondary(wd) + "; " +
                        sweep_summary("nlm", sweeps().nlm) + " secondary max " + secondary(wn)};
}

// ---------------------------------------------------------------------------
// 3-5: demosaicked noise statistics on a 512x512 image
// ---------------------------------------------------------------------------

const NoiseField& noise_of(DemosaickerId id) {
    static const PlanarImage gt = testing::load_named("astronaut");
    static const NoiseField ha = demosaicked_noise(gt, BayerPattern{}, {kSigma, kSeed}, DemosaickerId::HA);
    static const NoiseField ri = demosaicked_noise(gt, BayerPattern{}, {kSigma, kSeed}, DemosaickerId::RI);
    return id == DemosaickerId::HA ? ha : ri;
}

Outcome criterion3() {
    const double s2 = kSigma * kSigma;
    const SpatialCovTable ha = spatial_covariance(noise_of(DemosaickerId::HA), ColorSpace::YUV_ISO);
    const SpatialCovTable ri = spatial_covariance(noise_of(DemosaickerId::RI), ColorSpace::YUV_ISO);
    const bool ok_ha = ha.cov[0][0] > 1.25 * s2 && ha.cov[1][0] < 0.75 * s2 && ha.cov[2][0] < 0.75 * s2;
    const bool ok_ri = ri.cov[0][0] >= 550.0 && ri.cov[0][0] <= 900.0;
    return {ok_ha && ok_ri, "HA var Y/U/V " + fmt(ha.cov[0][0], 1) + "/" + fmt(ha.cov[1][0], 1) + "/" +
                                fmt(ha.cov[2][0], 1) + "; RI var Y " + fmt(ri.cov[0][0], 1)};
}

Outcome criterion4() {
    bool pass = true;
    std::string detail;
    for (DemosaickerId id : {DemosaickerId::HA, DemosaickerId::RI}) {
        const SpatialCovTable t = spatial_covariance(noise_of(id), ColorSpace::YUV_ISO);
        if (!t.corr[0] || !t.corr[1]) return {false, "degenerate channel"};
        const double u01 = (*t.corr[1])[1];  // offset (0,1)
        const double y11 = (*t.corr[0])[4];  // offset (1,1)
        pass = pass && u01 > 0.3 && y11 < 0.3;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(id)) + " corr U(0,1) " +
                  fmt(u01, 3) + " Y(1,1) " + fmt(y11, 3);
    }
    return {pass, detail};
}

Outcome criterion5() {
    const ChannelCovMatrix ha = channel_covariance(noise_of(DemosaickerId::HA));
    const ChannelCovMatrix ri = channel_covariance(noise_of(DemosaickerId::RI));
    const double rg = ha.corr[0][1], rb = ha.corr[0][2], gb = ha.corr[1][2];
    const bool ok_ha = rg > 0.3 && rb > 0.3 && gb > 0.3;
    const bool ok_ri = std::abs(ri.corr[0][1] - 0.65) <= 0.15;
    return {ok_ha && ok_ri, "HA corr RG/RB/GB " + fmt(rg, 3) + "/" + fmt(rb, 3) + "/" + fmt(gb, 3) +
                                "; RI corr RG " + fmt(ri.corr[0][1], 3)};
}

// ---------------------------------------------------------------------------
// 6: RMSE of demosaicked noise against sigma0
// ---------------------------------------------------------------------------

Outcome criterion6() {
    const std::vector<double> sigmas{1.0, 20.0, 40.0, 60.0};
    const auto rows = rmse_vs_sigma_table(corpus(), DemosaickerId::HA, sigmas, BayerPattern{}, kSeed);
    std::vector<double> ratio;
    for (std::size_t i = 1; i < rows.size(); ++i) ratio.push_back(rows[i].mean_rmse / rows[i].sigma0);
    bool pass = rows[0].mean_rmse > 2.0;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        pass = pass && ratio[i] >= 0.65 && ratio[i] <= 0.95;
        if (i > 0) pass = pass && ratio[i] < ratio[i - 1];
    }
    return {pass, "RMSE at sigma0=1 " + fmt(rows[0].mean_rmse, 3) + "; RMSE/sigma0 at 20/40/60 " + fmt(ratio[0]) +
                      "/" + fmt(ratio[1]) + "/" + fmt(ratio[2]) + " (required within [0.65, 0.95], decreasing)"};
}

// ---------------------------------------------------------------------------
// 7-8: noise model
// ---------------------------------------------------------------------------

Outcome criterion7() {
    const PlanarImage noisy = add_awgn(PlanarImage(512, 512), {kSigma, kSeed});
    const NoiseField nf{noisy};
    const SpatialCovTable t = spatial_covariance(nf, ColorSpace::RGB);
    const ChannelCovMatrix m = channel_covariance(nf);
    bool pass = true;
    double vlo = 1e300, vhi = -1e300, cmax = 0.0, rmax = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        vlo = std::min(vlo, t.cov[c][0]);
        vhi = std::max(vhi, t.cov[c][0]);
        for (std::size_t k = 1; k < 9; ++k) cmax = std::max(cmax, std::abs(t.cov[c][k]));
        for (std::size_t d = 0; d < 3; ++d)
            if (d != c) rmax = std::max(rmax, std::abs(m.corr[c][d]));
    }
    pass = vlo >= 392.0 && vhi <= 408.0 && cmax < 5.0 && rmax < 0.01;
    return {pass, "variance " + fmt(vlo, 2) + ".." + fmt(vhi, 2) + "; max off-origin |cov| " + fmt(cmax, 3) +
                      "; max cross |corr| " + fmt(rmax, 5)};
}

Outcome criterion8() {
    bool pass = true;
    std::string detail = "variance";
    for (double lambda : {10.0, 50.0, 100.0}) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(lambda) + kSeed);
        std::poisson_distribution<int> pois(lambda);
        double s = 0.0, s2 = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) {
            const double t = anscombe(pois(rng));
            s += t;
            s2 += t * t;
        }
        const double var = s2 / n - (s / n) * (s / n);
        pass = pass && var >= 0.90 && var <= 1.10;
        detail += " " + fmt(var, 4);
    }
    double worst = 0.0;
    for (double v = 0.0; v <= 1000.0; v += 0.125) worst = std::max(worst, std::abs(anscombe_inverse(anscombe(v)) - v));
    std::mt19937_64 rng(kSeed);
    const CfaImage cfa = testing::random_cfa(64, 64, BayerPattern{}, rng);
    const CfaImage back = vst_inverse(vst_forward(cfa));
    for (index_t y = 0; y < 64; ++y)
        for (index_t x = 0; x < 64; ++x) worst = std::max(worst, std::abs(back(y, x) - cfa(y, x)));
    pass = pass && worst <= 1e-9;
    return {pass, detail + "; max |inverse(forward(v)) - v| " + sci(worst)};
}

// ---------------------------------------------------------------------------
// 9: oracle equivalence
// ---------------------------------------------------------------------------

std::array<double, 3> direct_mse(const PlanarImage& a, const PlanarImage& b) {
    std::array<double, 3> s{};
    for (std::size_t c = 0; c < 3; ++c) {
        for (index_t y = 0; y < a.height(); ++y)
            for (index_t x = 0; x < a.width(); ++x) {
                const double d = a(c, y, x) - b(c, y, x);
                s[c] += d * d;
            }
        s[c] /= static_cast<double>(a.width() * a.height());
    }
    return s;
}

index_t reflect(index_t i, index_t n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
}

/// Average of the nearest same-color samples in the reflected 3x3
/// neighborhood.
PlanarImage bilinear_oracle(const CfaImage& cfa) {
    const index_t w = cfa.width(), h = cfa.height();
    PlanarImage out(w, h);
    for (int c = 0; c < 3; ++c)
        for (index_t y = 0; y < h; ++y)
            for (index_t x = 0; x < w; ++x) {
                int best = std::numeric_limits<int>::max(), count = 0;
                double sum = 0.0;
                for (index_t dy = -1; dy <= 1; ++dy)
                    for (index_t dx = -1; dx <= 1; ++dx) {
                        if (cfa.pattern().at(y + dy, x + dx) != c) continue;
                        const int d2 = static_cast<int>(dy * dy + dx * dx);
                        const double v = cfa(reflect(y + dy, h), reflect(x + dx, w));
                        if (d2 < best) {
                            best = d2;
                            sum = v;
                            count = 1;
                        } else if (d2 == best) {
                            sum += v;
                            ++count;
                        }
                    }
                out(static_cast<std::size_t>(c), y, x) = sum / count;
            }
    return out;
}

Outcome criterion9() {
    std::mt19937_64 rng(kSeed);
    double dc = 0.0, dr = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const index_t w = 4 + trial % 29, h = 4 + trial % 23;
        const PlanarImage a = testing::random_image(w, h, rng);
        const PlanarImage b = testing::random_image(w, h, rng);
        const auto mse = direct_mse(a, b);
        const double m = (mse[0] + mse[1] + mse[2]) / 3.0;
        dc = std::max(dc, std::abs(cpsnr(a, b) - 10.0 * std::log10(255.0 * 255.0 / m)));
        dr = std::max(dr, std::abs(rmse(a, b) - std::sqrt(m)));
    }
    std::uniform_int_distribution<int> dist(0, 255);
    int mismatches = 0;
    for (BayerPattern p : testing::kAllPatterns)
        for (int trial = 0; trial < 25; ++trial) {
            CfaImage cfa(4, 4, p);
            for (double& v : cfa.samples().data()) v = dist(rng);
            if (!(demosaic_bilinear(cfa) == bilinear_oracle(cfa))) ++mismatches;
        }
    return {dc <= 1e-12 && dr <= 1e-12 && mismatches == 0,
            "max CPSNR diff " + sci(dc) + " dB, max RMSE diff " + sci(dr) + ", 4x4 bilinear " +
                std::to_string(mismatches) + "/100 mismatches"};
}

// ---------------------------------------------------------------------------
// 10: structural invariants
// ---------------------------------------------------------------------------

constexpr DemosaickerId kDemosaickers[] = {DemosaickerId::Bilinear, DemosaickerId::HA, DemosaickerId::RI};
constexpr DenoiserId kDenoisers[] = {DenoiserId::DCT_YUV, DenoiserId::NLM_Y};
constexpr CfaAdapter kAdapters[] = {CfaAdapter::HalfSize, CfaAdapter::FourPhase};
constexpr SchemeOrder kOrders[] = {SchemeOrder::DenoiseThenDemosaic, SchemeOrder::DemosaicThenDenoise};

Outcome criterion10() {
    std::vector<std::string> failures;
    std::mt19937_64 rng(kSeed);
    const PlanarImage natural = testing::crop(testing::load_named("coffee"), 200, 120, 64, 64);

    for (DemosaickerId id : kDemosaickers)
        for (BayerPattern p : testing::kAllPatterns) {
            const CfaImage cfa = testing::random_cfa(24, 18, p, rng);
            if (!(mosaic(demosaic(cfa, id), p) == cfa)) failures.push_back("interpolating " + std::string(to_string(id)));
            const CfaImage nat = mosaic(natural, p);
            if (!(mosaic(demosaic(nat, id), p) == nat)) failures.push_back("interpolating " + std::string(to_string(id)));
        }

    for (BayerPattern p : testing::kAllPatterns) {
        const CfaImage cfa = testing::random_cfa(20, 14, p, rng);
        if (!(recombine_half_size(rearrange_half_size(cfa)) == cfa)) failures.push_back("half-size bijection");
    }

    for (DenoiserId dn : kDenoisers) {
        DenoiserConfig d;
        d.id = dn;
        d.sigma = 0.0;
        if (!(denoise_color(natural, d) == natural)) failures.push_back("sigma=0 color " + std::string(to_string(dn)));
        const CfaImage cfa = mosaic(natural, BayerPattern{});
        for (CfaAdapter a : kAdapters)
            if (!(denoise_cfa(cfa, d, a) == cfa)) failures.push_back("sigma=0 mosaic " + std::string(to_string(a)));
    }

    testing::ThreadCountGuard guard;
    for (SchemeOrder o : kOrders)
        for (DenoiserId dn : kDenoisers)
            for (CfaAdapter a : kAdapters)
                for (DemosaickerId dm : kDemosaickers) {
                    SchemeConfig c;
                    c.order = o;
                    c.demosaicker = dm;
                    c.denoiser.id = dn;
                    c.cfa_adapter = a;
                    c.factor_c = 1.5;
                    c.seed = kSeed;
                    c.sigma0 = 0.0;
                    const PlanarImage plain = clip_to_range(demosaic(mosaic(natural, c.pattern), dm), 0.0, 255.0);
                    if (!(run_scheme(natural, c).restored == plain)) failures.push_back("sigma=0 scheme");
                    c.sigma0 = kSigma;
                    set_thread_count(1);
                    const SchemeResult ref = run_scheme(natural, c);
                    for (unsigned t : {2u, 8u}) {
                        set_thread_count(t);
                        const SchemeResult r = run_scheme(natural, c);
                        if (!(r.restored == ref.restored) || r.cpsnr != ref.cpsnr)
                            failures.push_back("thread determinism " + std::string(to_string(o)));
                    }
                }

    std::string detail = failures.empty() ? "all invariants hold" : std::to_string(failures.size()) + " violations:";
    for (std::size_t i = 0; i < failures.size() && i < 5; ++i) detail += " " + failures[i] + ";";
    return {failures.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"factor optimum in [1.3, 1.8] with >= 0.3 dB gain", criterion1},
        {"unimodal factor sweep", criterion2},
        {"luminance-elongated demosaicked noise", criterion3},
        {"chromatic low-frequency noise", criterion4},
        {"RGB channel correlation", criterion5},
        {"RMSE trend of demosaicked noise", criterion6},
        {"AWGN sanity", criterion7},
        {"variance-stabilizing transform", criterion8},
        {"oracle equivalence", criterion9},
        {"structural invariants", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu: %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

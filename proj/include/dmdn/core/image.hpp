// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmdn/core/error.hpp"

namespace dmdn {

using index_t = std::ptrdiff_t;

/// A single row-major plane of 64-bit samples.
class Plane {
public:
    Plane() = default;
    Plane(index_t width, index_t height, double fill = 0.0)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(checked_area(width, height)), fill) {}

    index_t width() const noexcept { return width_; }
    index_t height() const noexcept { return height_; }
    index_t size() const noexcept { return width_ * height_; }

    double& operator()(index_t y, index_t x) noexcept {
        return data_[static_cast<std::size_t>(y * width_ + x)];
    }
    double operator()(index_t y, index_t x) const noexcept {
        return data_[static_cast<std::size_t>(y * width_ + x)];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(index_t y) noexcept {
        return std::span<double>(data_).subspan(static_cast<std::size_t>(y * width_),
                                                static_cast<std::size_t>(width_));
    }
    std::span<const double> row(index_t y) const noexcept {
        return std::span<const double>(data_).subspan(static_cast<std::size_t>(y * width_),
                                                      static_cast<std::size_t>(width_));
    }

    bool same_shape(const Plane& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }
    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    static index_t checked_area(index_t w, index_t h) {
        require(w >= 0 && h >= 0, "plane dimensions must be non-negative");
        return w * h;
    }

    index_t width_ = 0;
    index_t height_ = 0;
    std::vector<double> data_;
};

enum class ColorSpace { RGB, YUV_ISO };

inline std::string_view to_string(ColorSpace cs) {
    return cs == ColorSpace::RGB ? "rgb" : "yuv";
}

/// Full-resolution three-plane color image. Samples are nominally in
/// [0, 255] but may leave that range before clipping.
class PlanarImage {
public:
    PlanarImage() = default;
    PlanarImage(index_t width, index_t height, ColorSpace space = ColorSpace::RGB, double fill = 0.0)
        : planes_{Plane(width, height, fill), Plane(width, height, fill), Plane(width, height, fill)},
          space_(space) {
        require(width >= 2 && height >= 2, "image must be at least 2x2");
    }
    PlanarImage(std::array<Plane, 3> planes, ColorSpace space)
        : planes_(std::move(planes)), space_(space) {
        require(planes_[0].same_shape(planes_[1]) && planes_[0].same_shape(planes_[2]),
                "color planes must share dimensions");
        require(width() >= 2 && height() >= 2, "image must be at least 2x2");
    }

    index_t width() const noexcept { return planes_[0].width(); }
    index_t height() const noexcept { return planes_[0].height(); }
    ColorSpace space() const noexcept { return space_; }
    void set_space(ColorSpace cs) noexcept { space_ = cs; }

    Plane& operator[](std::size_t c) noexcept { return planes_[c]; }
    const Plane& operator[](std::size_t c) const noexcept { return planes_[c]; }
    double& operator()(std::size_t c, index_t y, index_t x) noexcept { return planes_[c](y, x); }
    double operator()(std::size_t c, index_t y, index_t x) const noexcept { return planes_[c](y, x); }

    std::array<Plane, 3>& planes() noexcept { return planes_; }
    const std::array<Plane, 3>& planes() const noexcept { return planes_; }

    bool same_shape(const PlanarImage& o) const noexcept { return planes_[0].same_shape(o.planes_[0]); }
    bool all_finite() const noexcept {
        return std::all_of(planes_.begin(), planes_.end(), [](const Plane& p) { return p.all_finite(); });
    }

    friend bool operator==(const PlanarImage&, const PlanarImage&) = default;

private:
    std::array<Plane, 3> planes_;
    ColorSpace space_ = ColorSpace::RGB;
};

enum Channel : int { kRed = 0, kGreen = 1, kBlue = 2 };

struct CellSite {
    index_t dy;
    index_t dx;
    friend bool operator==(const CellSite&, const CellSite&) = default;
};

/// Bayer phase, named by the colors of the top-left 2x2 cell in raster order.
class BayerPattern {
public:
    enum class Phase { RGGB, GRBG, GBRG, BGGR };

    constexpr BayerPattern(Phase phase = Phase::RGGB) noexcept : phase_(phase) {}

    constexpr Phase phase() const noexcept { return phase_; }

    constexpr CellSite red_site() const noexcept {
        switch (phase_) {
            case Phase::RGGB: return {0, 0};
            case Phase::GRBG: return {0, 1};
            case Phase::GBRG: return {1, 0};
            case Phase::BGGR: return {1, 1};
        }
        return {0, 0};
    }
    constexpr CellSite blue_site() const noexcept {
        const CellSite r = red_site();
        return {1 - r.dy, 1 - r.dx};
    }
    /// Green sharing a row with red.
    constexpr CellSite green1_site() const noexcept {
        const CellSite r = red_site();
        return {r.dy, 1 - r.dx};
    }
    /// Green sharing a row with blue.
    constexpr CellSite green2_site() const noexcept {
        const CellSite r = red_site();
        return {1 - r.dy, r.dx};
    }

    constexpr Channel at(index_t y, index_t x) const noexcept {
        const index_t py = y & 1;
        const index_t px = x & 1;
        const CellSite r = red_site();
        if (py == r.dy && px == r.dx) return kRed;
        if (py != r.dy && px != r.dx) return kBlue;
        return kGreen;
    }

    friend constexpr bool operator==(BayerPattern, BayerPattern) = default;

private:
    Phase phase_;
};

inline std::string_view to_string(BayerPattern p) {
    switch (p.phase()) {
        case BayerPattern::Phase::RGGB: return "rggb";
        case BayerPattern::Phase::GRBG: return "grbg";
        case BayerPattern::Phase::GBRG: return "gbrg";
        case BayerPattern::Phase::BGGR: return "bggr";
    }
    return "rggb";
}

inline BayerPattern parse_pattern(std::string_view s) {
    if (s == "rggb") return BayerPattern::Phase::RGGB;
    if (s == "grbg") return BayerPattern::Phase::GRBG;
    if (s == "gbrg") return BayerPattern::Phase::GBRG;
    if (s == "bggr") return BayerPattern::Phase::BGGR;
    throw ContractError("unknown Bayer pattern '" + std::string(s) + "'");
}

/// Single-plane Bayer mosaic. Both dimensions are even.
class CfaImage {
public:
    CfaImage() = default;
    CfaImage(Plane samples, BayerPattern pattern) : samples_(std::move(samples)), pattern_(pattern) {
        require(samples_.width() >= 2 && samples_.height() >= 2, "CFA must be at least 2x2");
        require(samples_.width() % 2 == 0 && samples_.height() % 2 == 0,
                "CFA dimensions must be even");
    }
    CfaImage(index_t width, index_t height, BayerPattern pattern, double fill = 0.0)
        : CfaImage(Plane(width, height, fill), pattern) {}

    index_t width() const noexcept { return samples_.width(); }
    index_t height() const noexcept { return samples_.height(); }
    BayerPattern pattern() const noexcept { return pattern_; }

    Plane& samples() noexcept { return samples_; }
    const Plane& samples() const noexcept { return samples_; }
    double& operator()(index_t y, index_t x) noexcept { return samples_(y, x); }
    double operator()(index_t y, index_t x) const noexcept { return samples_(y, x); }

    friend bool operator==(const CfaImage&, const CfaImage&) = default;

private:
    Plane samples_;
    BayerPattern pattern_;
};

}  // namespace dmdn

// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

// Binary portable pixmaps: P6 (color) and P5 (gray/mosaic), 8 or 16 bits.
// Codes map to intensities as value = code * 255 / maxval, so 8-bit files
// are read verbatim and 16-bit files carry 1/257 steps of the 8-bit scale.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"

namespace dmdn::io {

enum class BitDepth { Eight = 8, Sixteen = 16 };

struct PnmData {
    index_t width = 0;
    index_t height = 0;
    int channels = 0;  // 1 for P5, 3 for P6
    int maxval = 0;
    std::vector<Plane> planes;
};

namespace detail {

inline constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 31;

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::uint64_t read_uint(const char* what) {
        skip_space_and_comments();
        std::uint64_t v = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
            if (v > kMaxSamples) throw FormatError(std::string("pixmap ") + what + " overflows");
            ++pos_;
            ++digits;
        }
        if (digits == 0) throw FormatError(std::string("pixmap header: missing ") + what);
        return v;
    }

    /// Exactly one whitespace byte separates maxval from the raster.
    void end_of_header() {
        if (pos_ >= bytes_.size()) throw FormatError("pixmap truncated after header");
        const char c = bytes_[pos_];
        if (!(c == ' ' || c == '\t' || c == '\n' || c == '\r')) throw FormatError("pixmap header: bad terminator");
        ++pos_;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline PnmData decode_pnm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
        throw FormatError("unknown pixmap magic (expected P5 or P6)");
    PnmData d;
    d.channels = bytes[1] == '6' ? 3 : 1;
    detail::HeaderReader rd(bytes);
    rd.advance(2);
    const auto w = rd.read_uint("width");
    const auto h = rd.read_uint("height");
    const auto maxval = rd.read_uint("maxval");
    if (w == 0 || h == 0) throw FormatError("pixmap has zero dimension");
    if (maxval == 0 || maxval > 65535) throw FormatError("pixmap maxval must be in [1, 65535]");
    if (w * h > detail::kMaxSamples / 3) throw FormatError("pixmap dimensions overflow");
    rd.end_of_header();

    d.width = static_cast<index_t>(w);
    d.height = static_cast<index_t>(h);
    d.maxval = static_cast<int>(maxval);
    const std::size_t bps = maxval > 255 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(w * h) * static_cast<std::size_t>(d.channels) * bps;
    if (bytes.size() - rd.pos() < need) throw FormatError("pixmap payload truncated");

    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + rd.pos());
    const double scale = 255.0 / static_cast<double>(maxval);
    d.planes.assign(static_cast<std::size_t>(d.channels), Plane(d.width, d.height));
    for (index_t y = 0; y < d.height; ++y)
        for (index_t x = 0; x < d.width; ++x)
            for (int c = 0; c < d.channels; ++c) {
                unsigned code = *p++;
                if (bps == 2) code = (code << 8) | *p++;
                if (code > maxval) throw FormatError("pixmap sample exceeds maxval");
                d.planes[static_cast<std::size_t>(c)](y, x) =
                    maxval == 255 ? static_cast<double>(code) : static_cast<double>(code) * scale;
            }
    return d;
}

/// Rounds each sample to the nearest code of the chosen depth, clamping
/// to the representable range.
inline std::string encode_pnm(const std::vector<const Plane*>& planes, BitDepth depth) {
    require(planes.size() == 1 || planes.size() == 3, "pixmap needs 1 or 3 planes");
    const Plane& first = *planes[0];
    const int maxval = depth == BitDepth::Eight ? 255 : 65535;
    const double scale = depth == BitDepth::Eight ? 1.0 : 257.0;
    std::string out = (planes.size() == 3 ? "P6\n" : "P5\n") + std::to_string(first.width()) + " " +
                      std::to_string(first.height()) + "\n" + std::to_string(maxval) + "\n";
    out.reserve(out.size() + static_cast<std::size_t>(first.size()) * planes.size() * (depth == BitDepth::Eight ? 1 : 2));
    for (index_t y = 0; y < first.height(); ++y)
        for (index_t x = 0; x < first.width(); ++x)
            for (const Plane* pl : planes) {
                const double v = std::round((*pl)(y, x) * scale);
                const auto code = static_cast<unsigned>(std::clamp(std::isfinite(v) ? v : 0.0, 0.0, static_cast<double>(maxval)));
                if (depth == BitDepth::Sixteen) out.push_back(static_cast<char>(code >> 8));
                out.push_back(static_cast<char>(code & 0xFF));
            }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to '" + path.string() + "'");
}

inline PnmData read_pnm(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

inline PlanarImage image_from_pnm(PnmData d) {
    if (d.channels != 3) throw FormatError("expected a color pixmap (P6)");
    return PlanarImage({std::move(d.planes[0]), std::move(d.planes[1]), std::move(d.planes[2])}, ColorSpace::RGB);
}

inline PlanarImage load_image(const std::filesystem::path& path) { return image_from_pnm(read_pnm(path)); }

inline CfaImage load_cfa(const std::filesystem::path& path, BayerPattern pattern) {
    PnmData d = read_pnm(path);
    if (d.channels != 1) throw FormatError("expected a mosaic graymap (P5)");
    return CfaImage(std::move(d.planes[0]), pattern);
}

inline void save_image(const PlanarImage& img, const std::filesystem::path& path, BitDepth depth = BitDepth::Eight) {
    require(img.space() == ColorSpace::RGB, "only RGB images can be saved");
    write_file(path, encode_pnm({&img[0], &img[1], &img[2]}, depth));
}

inline void save_cfa(const CfaImage& cfa, const std::filesystem::path& path, BitDepth depth = BitDepth::Eight) {
    write_file(path, encode_pnm({&cfa.samples()}, depth));
}

}  // namespace dmdn::io

// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dmdn/analysis.hpp"
#include "dmdn/schemes.hpp"

namespace dmdn::io {

/// Locale-independent shortest round-trip form; infinities print as "inf"
/// and "-inf", NaN as "nan".
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_field(fields[i]);
    }
    out << '\n';
}

/// Configuration echo lines, each prefixed by "# ".
inline void write_comments(std::ostream& out, const std::vector<std::string>& lines) {
    for (const auto& l : lines) out << "# " << l << '\n';
}

inline std::string offset_label(CellSite o) {
    return "(" + std::to_string(o.dy) + "," + std::to_string(o.dx) + ")";
}

/// channel,stat,(0,0),...,(2,2) with one "cov" and one "corr" row per
/// channel; an undefined correlation row is written as "nan".
inline void write_spatial_cov(std::ostream& out, const SpatialCovTable& t) {
    std::vector<std::string> header{"channel", "stat"};
    for (auto o : kCovOffsets) header.push_back(offset_label(o));
    write_csv_row(out, header);
    const auto names = t.channel_names();
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<std::string> cov{names[c], "cov"}, corr{names[c], "corr"};
        for (std::size_t k = 0; k < 9; ++k) {
            cov.push_back(format_number(t.cov[c][k]));
            corr.push_back(t.corr[c] ? format_number((*t.corr[c])[k]) : "nan");
        }
        write_csv_row(out, cov);
        write_csv_row(out, corr);
    }
}

/// channel,stat,R,G,B
inline void write_channel_cov(std::ostream& out, const ChannelCovMatrix& m) {
    write_csv_row(out, {"channel", "stat", "R", "G", "B"});
    const char* names[] = {"R", "G", "B"};
    for (std::size_t a = 0; a < 3; ++a) {
        std::vector<std::string> cov{names[a], "cov"}, corr{names[a], "corr"};
        for (std::size_t b = 0; b < 3; ++b) {
            cov.push_back(format_number(m.cov[a][b]));
            corr.push_back(format_number(m.corr[a][b]));
        }
        write_csv_row(out, cov);
        write_csv_row(out, corr);
    }
}

/// factor_c,mean_cpsnr,<one column per image>
inline void write_sweep(std::ostream& out, const SweepResult& r, const std::vector<std::string>& image_names) {
    std::vector<std::string> header{"factor_c", "mean_cpsnr"};
    header.insert(header.end(), image_names.begin(), image_names.end());
    write_csv_row(out, header);
    for (const auto& row : r.rows) {
        std::vector<std::string> f{format_number(row.factor_c), format_number(row.mean_cpsnr)};
        for (double v : row.per_image) f.push_back(format_number(v));
        write_csv_row(out, f);
    }
}

/// sigma0,mean_rmse,<one column per image>
inline void write_rmse_table(std::ostream& out, const std::vector<RmseRow>& rows,
                             const std::vector<std::string>& image_names) {
    std::vector<std::string> header{"sigma0", "mean_rmse"};
    header.insert(header.end(), image_names.begin(), image_names.end());
    write_csv_row(out, header);
    for (const auto& row : rows) {
        std::vector<std::string> f{format_number(row.sigma0), format_number(row.mean_rmse)};
        for (double v : row.per_image) f.push_back(format_number(v));
        write_csv_row(out, f);
    }
}

}  // namespace dmdn::io

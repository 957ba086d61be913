// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. run_cli() is the whole program; main() only
// forwards argv so the tests can drive it in-process.

#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmdn/dmdn.hpp"
#include "dmdn/io/csv.hpp"
#include "dmdn/io/dataset.hpp"
#include "dmdn/io/pnm.hpp"

namespace dmdn::cli {

namespace fs = std::filesystem;

/// Parses "a:b:step" into the inclusive factor list.
inline std::vector<double> parse_factor_range(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw ContractError("--factors expects a:b:step, got '" + spec + "'");
        parts.push_back(v);
    }
    if (parts.size() != 3) throw ContractError("--factors expects a:b:step, got '" + spec + "'");
    return factor_range(parts[0], parts[1], parts[2]);
}

/// Parses a comma-separated list of non-negative noise levels.
inline std::vector<double> parse_sigma_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !(v >= 0.0) || !std::isfinite(v))
            throw ContractError("--rmse-sigmas expects comma-separated values >= 0, got '" + spec + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ContractError("--rmse-sigmas is empty");
    return out;
}

inline io::BitDepth parse_bits(int bits) {
    if (bits == 8) return io::BitDepth::Eight;
    if (bits == 16) return io::BitDepth::Sixteen;
    throw ContractError("--bits must be 8 or 16");
}

/// Sorted copy of the input paths; rows of every report follow this order.
inline std::vector<std::string> sorted_inputs(std::vector<std::string> paths) {
    std::sort(paths.begin(), paths.end());
    return paths;
}

inline std::vector<std::string> file_names(const std::vector<std::string>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(fs::path(p).filename().string());
    return out;
}

/// Writes to the file at `path`, or to `fallback` when path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file_) throw FormatError("cannot write '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

struct DenoiserFlags {
    std::string dn = "dct";
    index_t patch_radius = 3;
    index_t search_radius = 10;
    index_t block_size = 8;
    double nlm_h = 0.4;

    void add_to(CLI::App* app) {
        app->add_option("--dn", dn, "Denoiser: nlm | dct")->capture_default_str();
        app->add_option("--patch-radius", patch_radius, "NL-means patch radius")->capture_default_str();
        app->add_option("--search-radius", search_radius, "NL-means search radius")->capture_default_str();
        app->add_option("--block-size", block_size, "DCT block size")->capture_default_str();
        app->add_option("--nlm-h", nlm_h, "NL-means filtering parameter h as a multiple of sigma")
            ->capture_default_str();
    }

    DenoiserConfig config(double sigma) const {
        DenoiserConfig c;
        c.id = parse_denoiser(dn);
        c.sigma = sigma;
        c.patch_radius = patch_radius;
        c.search_radius = search_radius;
        c.block_size = block_size;
        c.nlm_h = nlm_h;
        c.validate();
        return c;
    }

    std::string echo() const {
        return "--dn " + dn + " --patch-radius " + std::to_string(patch_radius) + " --search-radius " +
               std::to_string(search_radius) + " --block-size " + std::to_string(block_size) + " --nlm-h " +
               io::format_number(nlm_h);
    }
};

inline std::string join_inputs(const std::vector<std::string>& inputs) {
    std::string s;
    for (const auto& p : inputs) s += " " + p;
    return s;
}

inline constexpr const char* kPipelineColumns =
    "CSV columns: image,cpsnr (one row per input, sorted by path, then a 'mean' row).\n"
    "Lines starting with '#' echo the command that reproduces the table.";
inline constexpr const char* kSweepColumns =
    "CSV columns: factor_c,mean_cpsnr,<one CPSNR column per input file name>.\n"
    "Lines starting with '#' echo the command that reproduces the table.";
inline constexpr const char* kNoiseStatsColumns =
    "--csv columns: channel,stat,(0,0),(0,1),(0,2),(1,0),(1,1),(1,2),(2,0),(2,1),(2,2);\n"
    "  one cov and one corr row per channel, offsets are (row,col) lags\n"
    "  (offset labels are double-quoted since they contain a comma).\n"
    "--channel-csv columns: channel,stat,R,G,B; cov and corr rows per channel.\n"
    "--rmse-csv columns: sigma0,mean_rmse,<one RMSE column per input file name>.\n"
    "Lines starting with '#' echo the command that reproduces the table.";

/// Runs the tool on `args` (without the program name). Returns the exit
/// status; every error is reported as one "dmdn: error: ..." line on err.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Demosaicking and denoising experiments on Bayer mosaics", "dmdn"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: DMDN_THREADS or hardware concurrency)");

    std::string pattern = "rggb", dm = "ha", order = "dm-dn", adapter = "halfsize", out_path, csv_path;
    std::string factors = "1.0:1.9:0.1", space = "yuv", channel_csv, rmse_csv, rmse_sigmas, dataset = "kodak", dest;
    double sigma = 0.0, factor = 1.0;
    std::uint64_t seed = 0;
    int bits = 8;
    std::string input;
    std::vector<std::string> inputs;
    DenoiserFlags dnf;

    auto add_pattern = [&](CLI::App* s) {
        s->add_option("--pattern", pattern, "Bayer pattern: rggb | grbg | gbrg | bggr")->capture_default_str();
    };
    auto add_bits = [&](CLI::App* s) {
        s->add_option("--bits", bits, "Output sample depth: 8 | 16 (values are rounded and clamped to [0,255])")
            ->capture_default_str();
    };

    auto* mosaic_cmd = app.add_subcommand("mosaic", "Sample a color image (P6) into a Bayer mosaic (P5)");
    mosaic_cmd->add_option("input", input, "Color image")->required();
    add_pattern(mosaic_cmd);
    mosaic_cmd->add_option("--out", out_path, "Output mosaic")->required();
    add_bits(mosaic_cmd);

    auto* noise_cmd = app.add_subcommand("add-noise", "Add white Gaussian noise to a mosaic (P5) or color image (P6)");
    noise_cmd->add_option("input", input, "Input image")->required();
    noise_cmd->add_option("--sigma", sigma, "Noise standard deviation (0-255 scale)")->required();
    noise_cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
    noise_cmd->add_option("--out", out_path, "Output image")->required();
    add_bits(noise_cmd);

    auto* dm_cmd = app.add_subcommand("demosaic", "Demosaic a Bayer mosaic (P5) to color (P6)");
    dm_cmd->add_option("input", input, "Mosaic")->required();
    add_pattern(dm_cmd);
    dm_cmd->add_option("--dm", dm, "Demosaicker: bilinear | ha | ri")->capture_default_str();
    dm_cmd->add_option("--out", out_path, "Output color image")->required();
    add_bits(dm_cmd);

    auto* dn_cmd = app.add_subcommand("denoise", "Denoise a color image (P6) or a mosaic (P5, through --adapter)");
    dn_cmd->add_option("input", input, "Input image")->required();
    dn_cmd->add_option("--sigma", sigma, "Noise level handed to the denoiser")->required();
    dnf.add_to(dn_cmd);
    dn_cmd->add_option("--adapter", adapter, "Mosaic adapter: halfsize | fourphase")->capture_default_str();
    add_pattern(dn_cmd);
    dn_cmd->add_option("--out", out_path, "Output image")->required();
    add_bits(dn_cmd);

    auto* pipe_cmd = app.add_subcommand("pipeline", "Mosaic, add noise and restore each ground-truth image; report CPSNR");
    pipe_cmd->add_option("inputs", inputs, "Ground-truth color images")->required();
    pipe_cmd->add_option("--order", order, "dn-dm (denoise the mosaic first) | dm-dn")->capture_default_str();
    pipe_cmd->add_option("--dm", dm, "Demosaicker: bilinear | ha | ri")->capture_default_str();
    dnf.add_to(pipe_cmd);
    pipe_cmd->add_option("--adapter", adapter, "Mosaic adapter for dn-dm: halfsize | fourphase")->capture_default_str();
    pipe_cmd->add_option("--sigma", sigma, "Noise standard deviation sigma0")->required();
    pipe_cmd->add_option("--factor", factor, "dm-dn denoises at factor * sigma0")->capture_default_str();
    pipe_cmd->add_option("--seed", seed, "Base seed; image k uses seed + k")->capture_default_str();
    add_pattern(pipe_cmd);
    pipe_cmd->add_option("--csv", csv_path, "CSV report (default: stdout)");
    pipe_cmd->add_option("--out", out_path, "Directory for restored images (optional)");
    pipe_cmd->footer(kPipelineColumns);

    auto* sweep_cmd = app.add_subcommand("sweep", "CPSNR of demosaic-then-denoise over a range of factors");
    sweep_cmd->add_option("inputs", inputs, "Ground-truth color images")->required();
    sweep_cmd->add_option("--factors", factors, "Factor range a:b:step, inclusive")->capture_default_str();
    sweep_cmd->add_option("--dm", dm, "Demosaicker: bilinear | ha | ri")->capture_default_str();
    dnf.add_to(sweep_cmd);
    sweep_cmd->add_option("--sigma", sigma, "Noise standard deviation sigma0")->required();
    sweep_cmd->add_option("--seed", seed, "Base seed; image k uses seed + k")->capture_default_str();
    add_pattern(sweep_cmd);
    sweep_cmd->add_option("--csv", csv_path, "CSV report (default: stdout)");
    sweep_cmd->footer(kSweepColumns);

    auto* stats_cmd = app.add_subcommand("noise-stats", "Statistics of demosaicked noise");
    stats_cmd->add_option("inputs", inputs, "Ground-truth color images")->required();
    stats_cmd->add_option("--dm", dm, "Demosaicker: bilinear | ha | ri")->capture_default_str();
    stats_cmd->add_option("--sigma", sigma, "Noise standard deviation sigma0")->required();
    stats_cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
    add_pattern(stats_cmd);
    stats_cmd->add_option("--space", space, "Color space of the spatial table: rgb | yuv")->capture_default_str();
    stats_cmd->add_option("--csv", csv_path, "Spatial covariance table (default: stdout; single input only)");
    stats_cmd->add_option("--channel-csv", channel_csv, "RGB channel covariance table (single input only)");
    stats_cmd->add_option("--rmse-sigmas", rmse_sigmas, "Comma-separated sigma0 list for the RMSE table");
    stats_cmd->add_option("--rmse-csv", rmse_csv, "RMSE-versus-sigma0 table over all inputs");
    stats_cmd->footer(kNoiseStatsColumns);

    auto* fetch_cmd = app.add_subcommand("fetch", "Download a benchmark dataset and write a checksum manifest");
    fetch_cmd->add_option("--dataset", dataset, "Dataset name: kodak")->capture_default_str();
    fetch_cmd->add_option("--dest", dest, "Target directory (default: $DMDN_DATA_DIR/<name> or ./data/<name>)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "dmdn: error: " << msg << '\n';
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (threads > 0) set_thread_count(threads);
        const auto depth = parse_bits(bits);

        if (mosaic_cmd->parsed()) {
            const BayerPattern pat = parse_pattern(pattern);
            io::save_cfa(mosaic(io::load_image(input), pat), out_path, depth);
            return 0;
        }
        if (noise_cmd->parsed()) {
            const NoiseSpec spec{sigma, seed};
            spec.validate();
            io::PnmData d = io::read_pnm(input);
            if (d.channels == 1) {
                io::save_cfa(add_awgn(CfaImage(std::move(d.planes[0]), BayerPattern{}), spec), out_path, depth);
            } else {
                io::save_image(add_awgn(io::image_from_pnm(std::move(d)), spec), out_path, depth);
            }
            return 0;
        }
        if (dm_cmd->parsed()) {
            const BayerPattern pat = parse_pattern(pattern);
            const DemosaickerId id = parse_demosaicker(dm);
            io::save_image(clip_to_range(demosaic(io::load_cfa(input, pat), id), 0.0, 255.0), out_path, depth);
            return 0;
        }
        if (dn_cmd->parsed()) {
            const DenoiserConfig cfg = dnf.config(sigma);
            const CfaAdapter ad = parse_adapter(adapter);
            const BayerPattern pat = parse_pattern(pattern);
            io::PnmData d = io::read_pnm(input);
            if (d.channels == 1) {
                io::save_cfa(denoise_cfa(CfaImage(std::move(d.planes[0]), pat), cfg, ad), out_path, depth);
            } else {
                io::save_image(denoise_color(io::image_from_pnm(std::move(d)), cfg), out_path, depth);
            }
            return 0;
        }
        if (pipe_cmd->parsed()) {
            SchemeConfig cfg;
            cfg.order = parse_order(order);
            cfg.demosaicker = parse_demosaicker(dm);
            cfg.denoiser = dnf.config(0.0);
            cfg.cfa_adapter = parse_adapter(adapter);
            cfg.pattern = parse_pattern(pattern);
            cfg.sigma0 = sigma;
            cfg.factor_c = factor;
            cfg.seed = seed;
            cfg.validate();
            const auto paths = sorted_inputs(inputs);
            std::vector<PlanarImage> corpus;
            for (const auto& p : paths) corpus.push_back(io::load_image(p));
            const auto names = file_names(paths);
            std::vector<SchemeResult> results;
            double total = 0.0;
            for (std::size_t k = 0; k < corpus.size(); ++k) {
                SchemeConfig c = cfg;
                c.seed = derive_seed(seed, k);
                results.push_back(run_scheme(corpus[k], c));
                total += results.back().cpsnr;
            }
            if (!out_path.empty()) {
                fs::create_directories(out_path);
                for (std::size_t k = 0; k < paths.size(); ++k)
                    io::save_image(results[k].restored,
                                   fs::path(out_path) / (fs::path(paths[k]).stem().string() + ".ppm"));
            }
            Sink sink(csv_path, out);
            auto& os = sink.stream();
            io::write_comments(os, {"dmdn pipeline --order " + order + " --dm " + dm + " " + dnf.echo() +
                                        " --adapter " + adapter + " --pattern " + pattern + " --sigma " +
                                        io::format_number(sigma) + " --factor " + io::format_number(factor) +
                                        " --seed " + std::to_string(seed) + join_inputs(paths)});
            io::write_csv_row(os, {"image", "cpsnr"});
            for (std::size_t k = 0; k < paths.size(); ++k)
                io::write_csv_row(os, {names[k], io::format_number(results[k].cpsnr)});
            io::write_csv_row(os, {"mean", io::format_number(total / static_cast<double>(paths.size()))});
            return 0;
        }
        if (sweep_cmd->parsed()) {
            SchemeConfig cfg;
            cfg.demosaicker = parse_demosaicker(dm);
            cfg.denoiser = dnf.config(0.0);
            cfg.pattern = parse_pattern(pattern);
            cfg.sigma0 = sigma;
            cfg.seed = seed;
            cfg.validate();
            const auto fs_list = parse_factor_range(factors);
            const auto paths = sorted_inputs(inputs);
            std::vector<PlanarImage> corpus;
            for (const auto& p : paths) corpus.push_back(io::load_image(p));
            const auto result = sweep_factor(corpus, cfg, fs_list);
            Sink sink(csv_path, out);
            auto& os = sink.stream();
            io::write_comments(os, {"dmdn sweep --factors " + factors + " --dm " + dm + " " + dnf.echo() +
                                        " --pattern " + pattern + " --sigma " + io::format_number(sigma) +
                                        " --seed " + std::to_string(seed) + join_inputs(paths)});
            io::write_sweep(os, result, file_names(paths));
            return 0;
        }
        if (stats_cmd->parsed()) {
            const DemosaickerId id = parse_demosaicker(dm);
            const BayerPattern pat = parse_pattern(pattern);
            const NoiseSpec spec{sigma, seed};
            spec.validate();
            ColorSpace cs;
            if (space == "rgb")
                cs = ColorSpace::RGB;
            else if (space == "yuv")
                cs = ColorSpace::YUV_ISO;
            else
                throw ContractError("--space must be rgb or yuv");
            std::vector<double> sigmas;
            if (!rmse_sigmas.empty()) sigmas = parse_sigma_list(rmse_sigmas);
            if (rmse_csv.empty() != rmse_sigmas.empty())
                throw ContractError("--rmse-csv and --rmse-sigmas must be given together");
            const bool want_tables = !csv_path.empty() || !channel_csv.empty() || rmse_csv.empty();
            if (want_tables && inputs.size() != 1)
                throw ContractError("covariance tables need exactly one input image");
            const auto paths = sorted_inputs(inputs);
            const std::string echo = "dmdn noise-stats --dm " + dm + " --sigma " + io::format_number(sigma) +
                                     " --seed " + std::to_string(seed) + " --pattern " + pattern + " --space " +
                                     space + (sigmas.empty() ? "" : " --rmse-sigmas " + rmse_sigmas) +
                                     join_inputs(paths);
            std::vector<PlanarImage> corpus;
            for (const auto& p : paths) corpus.push_back(io::load_image(p));
            if (want_tables) {
                const NoiseField nf = demosaicked_noise(corpus[0], pat, spec, id);
                const SpatialCovTable spatial = spatial_covariance(nf, cs);
                const ChannelCovMatrix channels = channel_covariance(nf);
                Sink sink(csv_path, out);
                io::write_comments(sink.stream(), {echo});
                io::write_spatial_cov(sink.stream(), spatial);
                if (!channel_csv.empty()) {
                    Sink ch(channel_csv, out);
                    io::write_comments(ch.stream(), {echo});
                    io::write_channel_cov(ch.stream(), channels);
                }
            }
            if (!rmse_csv.empty()) {
                const auto table = rmse_vs_sigma_table(corpus, id, sigmas, pat, seed);
                Sink sink(rmse_csv, out);
                io::write_comments(sink.stream(), {echo});
                io::write_rmse_table(sink.stream(), table, file_names(paths));
            }
            return 0;
        }
        if (fetch_cmd->parsed()) {
            const auto name = io::parse_dataset(dataset);
            const fs::path dir = dest.empty() ? io::default_dataset_dir(name) : fs::path(dest);
            io::FetchStats stats;
            const auto m = io::fetch_dataset(name, dir, io::http_get, &stats);
            out << "fetched " << stats.downloaded << ", reused " << stats.reused << ", " << m.entries.size()
                << " files in " << dir.string() << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "dmdn: error: " << msg << '\n';
        return 1;
    }
    return 1;
}

}  // namespace dmdn::cli

// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

// Dataset download and verification. Requires libpng, OpenSSL (libcrypto),
// nlohmann/json and cpp-httplib; only the CLI and its tests include this.

#pragma once

#include <png.h>
#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/io/pnm.hpp"

namespace dmdn::io {

enum class DatasetName { Kodak };

inline std::string_view to_string(DatasetName) { return "kodak"; }

inline DatasetName parse_dataset(std::string_view s) {
    if (s == "kodak") return DatasetName::Kodak;
    throw ContractError("unknown dataset '" + std::string(s) + "'");
}

struct ManifestEntry {
    std::string file;
    std::string url;
    std::string sha256;
};

struct DatasetManifest {
    std::string name;
    std::string source_url;
    std::vector<ManifestEntry> entries;
};

inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kKodakSource = "http://r0k.us/graphics/kodak/";
inline constexpr int kKodakCount = 25;

/// Returns the body of an HTTP GET or throws FetchError.
using HttpGet = std::function<std::string(const std::string& url)>;

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw FetchError("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

/// Decodes an 8-bit PNG held in memory to an RGB image.
inline PlanarImage decode_png(std::string_view bytes) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        throw FormatError(std::string("PNG decode failed: ") + img.message);
    img.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&img);
        throw FormatError(std::string("PNG decode failed: ") + img.message);
    }
    PlanarImage out(img.width, img.height);
    std::size_t k = 0;
    for (index_t y = 0; y < out.height(); ++y)
        for (index_t x = 0; x < out.width(); ++x)
            for (std::size_t c = 0; c < 3; ++c) out(c, y, x) = buf[k++];
    return out;
}

/// Plain-HTTP GET through cpp-httplib.
inline std::string http_get(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw FetchError("only http:// URLs are supported: " + url);
    const auto slash = url.find('/', scheme.size());
    const std::string host = url.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : url.substr(slash);
    httplib::Client cli(host);
    cli.set_follow_location(true);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(60);
    auto res = cli.Get(path);
    if (!res) throw FetchError("GET " + url + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw FetchError("GET " + url + " returned HTTP " + std::to_string(res->status));
    return res->body;
}

/// Default location for downloaded datasets: $DMDN_DATA_DIR/<name>, or
/// ./data/<name> when the variable is unset.
inline std::filesystem::path default_dataset_dir(DatasetName name) {
    const char* env = std::getenv("DMDN_DATA_DIR");
    std::filesystem::path root = env && *env ? env : "data";
    return root / std::string(to_string(name));
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : m.entries) files.push_back({{"file", e.file}, {"url", e.url}, {"sha256", e.sha256}});
    return {{"dataset", m.name}, {"source", m.source_url}, {"files", files}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.name = j.at("dataset").get<std::string>();
    m.source_url = j.at("source").get<std::string>();
    for (const auto& f : j.at("files"))
        m.entries.push_back({f.at("file").get<std::string>(), f.at("url").get<std::string>(),
                             f.at("sha256").get<std::string>()});
    return m;
}

inline DatasetManifest read_manifest(const std::filesystem::path& dir) {
    return manifest_from_json(nlohmann::json::parse(read_file(dir / kManifestFile)));
}

/// True when `dir` holds a manifest whose every file exists with the
/// recorded checksum.
inline bool verify_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir / kManifestFile)) return false;
    try {
        const auto m = read_manifest(dir);
        for (const auto& e : m.entries)
            if (!fs::exists(dir / e.file) || sha256_hex(read_file(dir / e.file)) != e.sha256) return false;
        return !m.entries.empty();
    } catch (const std::exception&) {
        return false;
    }
}

struct FetchStats {
    int downloaded = 0;
    int reused = 0;
};

/// Downloads the Kodak set into `dest` as 8-bit P6 files plus a checksum
/// manifest. Files already matching a previous manifest are kept. The
/// manifest is written last, after every file verified, and removed before
/// any new download so a failed run never leaves one behind.
inline DatasetManifest fetch_dataset(DatasetName name, const std::filesystem::path& dest, const HttpGet& get = http_get,
                                     FetchStats* stats = nullptr) {
    namespace fs = std::filesystem;
    fs::create_directories(dest);

    std::vector<ManifestEntry> previous;
    if (fs::exists(dest / kManifestFile)) {
        try {
            previous = read_manifest(dest).entries;
        } catch (const std::exception&) {
        }
    }
    auto known_hash = [&](const std::string& file) -> std::string {
        for (const auto& e : previous)
            if (e.file == file) return e.sha256;
        return {};
    };

    DatasetManifest manifest{std::string(to_string(name)), std::string(kKodakSource), {}};
    FetchStats local;
    bool manifest_removed = false;
    for (int i = 1; i <= kKodakCount; ++i) {
        char stem[16];
        std::snprintf(stem, sizeof stem, "kodim%02d", i);
        const std::string file = std::string(stem) + ".ppm";
        const std::string url = std::string(kKodakSource) + "kodak/" + stem + ".png";
        const fs::path target = dest / file;

        const std::string expected = known_hash(file);
        if (!expected.empty() && fs::exists(target) && sha256_hex(read_file(target)) == expected) {
            manifest.entries.push_back({file, url, expected});
            ++local.reused;
            continue;
        }
        if (!manifest_removed) {
            fs::remove(dest / kManifestFile);
            manifest_removed = true;
        }
        const PlanarImage img = decode_png(get(url));
        const std::string bytes = encode_pnm({&img[0], &img[1], &img[2]}, BitDepth::Eight);
        const std::string digest = sha256_hex(bytes);
        const fs::path tmp = dest / (file + ".part");
        write_file(tmp, bytes);
        fs::rename(tmp, target);
        if (sha256_hex(read_file(target)) != digest) throw FetchError("checksum mismatch after writing " + file);
        manifest.entries.push_back({file, url, digest});
        ++local.downloaded;
    }

    const fs::path tmp = dest / (std::string(kManifestFile) + ".part");
    write_file(tmp, manifest_to_json(manifest).dump(2) + "\n");
    fs::rename(tmp, dest / kManifestFile);
    if (stats) *stats = local;
    return manifest;
}

}  // namespace dmdn::io

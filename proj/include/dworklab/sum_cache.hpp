#pragma once

#include "expsum.hpp"
#include "parser.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

namespace dworklab {

using Sha256 = std::array<unsigned char, 32>;

inline Sha256 sha256(const std::string& data) {
    Sha256 out{};
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) || len != out.size())
        throw std::runtime_error("SHA-256 failed");
    return out;
}

inline std::string hex(const Sha256& h) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto c : h) {
        s += digits[c >> 4];
        s += digits[c & 15];
    }
    return s;
}

inline Sha256 poly_hash(const FieldPoly& f) { return sha256("q=" + std::to_string(f.field().q) + ";" + print_form(f)); }

inline std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("DWORKLAB_CACHE"); env && *env) return env;
    return ".dworklab";
}

// Files are "DWXS", u32 version, u32 q, u32 m, u32 k, 32-byte poly hash, then q^(m+1)
// little-endian (f64 re, f64 im) pairs in row-major (a, b_1, ..., b_m) order.
class SumTableCache {
public:
    static constexpr std::uint32_t kVersion = 1;

    explicit SumTableCache(std::filesystem::path dir = default_cache_dir()) : dir_(std::move(dir)) {}

    std::filesystem::path path_for(const FieldPoly& f) const {
        return dir_ / ("T_q" + std::to_string(f.field().q) + "_m" + std::to_string(f.nvars()) + "_" +
                       hex(poly_hash(f)).substr(0, 16) + ".dwxs");
    }

    std::optional<SumTable> load(const FieldPoly& f) const {
        std::ifstream in(path_for(f), std::ios::binary);
        if (!in) return std::nullopt;
        char magic[4];
        std::uint32_t version, q, m, k;
        Sha256 h;
        in.read(magic, 4);
        version = read_u32(in);
        q = read_u32(in);
        m = read_u32(in);
        k = read_u32(in);
        in.read(reinterpret_cast<char*>(h.data()), h.size());
        if (!in || std::memcmp(magic, "DWXS", 4) != 0 || version != kVersion || q != f.field().q || m != f.nvars() ||
            h != poly_hash(f))
            return std::nullopt;
        SumTable t;
        t.q = q;
        t.m = m;
        t.k = k;
        t.poly = f;
        std::uint64_t total = 1;
        for (std::uint32_t i = 0; i <= m; ++i) total *= q;
        t.values.resize(total);
        for (auto& v : t.values) {
            double re = read_f64(in), im = read_f64(in);
            v = {re, im};
        }
        if (!in || in.peek() != std::char_traits<char>::eof()) return std::nullopt;
        return t;
    }

    // Write to a temporary file in the same directory, then rename over the target.
    void store(const SumTable& t) const {
        std::filesystem::create_directories(dir_);
        auto target = path_for(t.poly);
        std::random_device rd;
        auto tmp = target;
        tmp += ".tmp" + std::to_string(rd());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
            out.write("DWXS", 4);
            write_u32(out, kVersion);
            write_u32(out, static_cast<std::uint32_t>(t.q));
            write_u32(out, static_cast<std::uint32_t>(t.m));
            write_u32(out, t.k);
            Sha256 h = poly_hash(t.poly);
            out.write(reinterpret_cast<const char*>(h.data()), h.size());
            for (const auto& v : t.values) {
                write_f64(out, v.real());
                write_f64(out, v.imag());
            }
            if (!out) throw std::runtime_error("short write to " + tmp.string());
        }
        std::filesystem::rename(tmp, target);
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    static void write_u32(std::ostream& out, std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 4);
    }
    static std::uint32_t read_u32(std::istream& in) {
        unsigned char b[4] = {};
        in.read(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
        return v;
    }
    static void write_f64(std::ostream& out, double d) {
        std::uint64_t v;
        std::memcpy(&v, &d, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 8);
    }
    static double read_f64(std::istream& in) {
        unsigned char b[8] = {};
        in.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
        double d;
        std::memcpy(&d, &v, 8);
        return d;
    }

    std::filesystem::path dir_;
};

// scan_all_pairs through the cache.
inline SumTable cached_scan(const FieldPoly& f, const SumTableCache* cache, const ScanOptions& opt = {}) {
    if (cache)
        if (auto t = cache->load(f)) return *t;
    SumTable t = scan_all_pairs(f, opt);
    if (cache) cache->store(t);
    return t;
}

}  // namespace dworklab

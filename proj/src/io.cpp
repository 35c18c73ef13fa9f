#include "qrc/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qrc {

PortfolioInput parse_portfolio_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("portfolio JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("obligors") || !doc["obligors"].is_array() ||
        doc["obligors"].empty())
        throw std::invalid_argument("portfolio JSON: need a non-empty 'obligors' array");

    PortfolioInput input;
    for (const auto& entry : doc["obligors"]) {
        if (!entry.is_object())
            throw std::invalid_argument("portfolio JSON: each obligor must be an object");
        Obligor ob;
        if (!entry.contains("exposure") || !entry["exposure"].is_number())
            throw std::invalid_argument("portfolio JSON: obligor missing numeric 'exposure'");
        ob.exposure = entry["exposure"].get<double>();
        if (!entry.contains("loading") || !entry["loading"].is_number())
            throw std::invalid_argument("portfolio JSON: obligor missing numeric 'loading'");
        ob.loading = entry["loading"].get<double>();
        const bool has_pd = entry.contains("pd");
        const bool has_threshold = entry.contains("threshold");
        if (has_pd == has_threshold)
            throw std::invalid_argument(
                "portfolio JSON: obligor needs exactly one of 'pd' or 'threshold'");
        if (has_pd) {
            const double pd = entry["pd"].get<double>();
            if (!(pd > 0.0 && pd < 1.0))
                throw std::invalid_argument("portfolio JSON: 'pd' must be in (0,1)");
            ob.threshold = inverse_std_normal_cdf(pd);
        } else {
            ob.threshold = entry["threshold"].get<double>();
        }
        input.portfolio.obligors.push_back(ob);
    }

    if (doc.contains("groups")) {
        if (!doc["groups"].is_array() || doc["groups"].empty())
            throw std::invalid_argument("portfolio JSON: 'groups' must be a non-empty array");
        std::vector<std::size_t> sizes;
        for (const auto& s : doc["groups"]) {
            if (!s.is_number_unsigned() || s.get<std::uint64_t>() == 0)
                throw std::invalid_argument("portfolio JSON: group sizes must be positive "
                                            "integers");
            sizes.push_back(s.get<std::size_t>());
        }
        input.groups = GroupPartition::from_sizes(sizes, input.portfolio.size());
    } else {
        input.groups = GroupPartition::single(input.portfolio.size());
    }
    validate(input.portfolio);
    return input;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

PortfolioInput load_portfolio_json(const std::string& path) {
    return parse_portfolio_json(read_file(path));
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string format_double_sci(double value, int precision) {
    std::array<char, 96> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                         std::chars_format::scientific, precision);
    if (ec != std::errc{}) throw std::invalid_argument("format_double_sci: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string state_snapshot_csv(const StateVector& state, double tol) {
    std::string out = "label,cell,defaults,flag,re,im\n";
    for (std::size_t label = 0; label < state.amp.size(); ++label) {
        const auto& a = state.amp[label];
        if (std::abs(a.real()) <= tol && std::abs(a.imag()) <= tol) continue;
        out += std::to_string(label);
        out += ',';
        out += std::to_string(state.basis.cell(label));
        out += ',';
        out += std::to_string(state.basis.defaults(label));
        out += ',';
        out += std::to_string(state.basis.flag(label));
        out += ',';
        out += format_double(a.real());
        out += ',';
        out += format_double(a.imag());
        out += '\n';
    }
    return out;
}

std::string schedule_json(const FPAASchedule& schedule) {
    nlohmann::json doc;
    doc["length"] = schedule.length;
    doc["delta"] = schedule.delta;
    doc["width"] = schedule.width;
    doc["floor"] = schedule.floor;
    doc["phases"] = schedule.phases;
    return doc.dump(2) + "\n";
}

std::string ledger_lines(const QueryLedger& ledger, std::string_view prefix) {
    const std::string p(prefix);
    std::string out;
    out += p + "usn_calls " + std::to_string(ledger.usn_calls) + "\n";
    out += p + "arithmetic_calls " + std::to_string(ledger.arithmetic_calls) + "\n";
    out += p + "cry_calls " + std::to_string(ledger.cry_calls) + "\n";
    out += p + "ugev_calls " + std::to_string(ledger.ugev_calls) + "\n";
    out += p + "uxi_calls " + std::to_string(ledger.uxi_calls) + "\n";
    out += p + "classical_samples " + std::to_string(ledger.classical_samples) + "\n";
    return out;
}

namespace {

// Compact SHA-1 (FIPS 180-4), enough for content addressing of small text
// payloads; not a general-purpose crypto primitive.
struct Sha1 {
    std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                                   0xC3D2E1F0u};
    std::array<std::uint8_t, 64> block{};
    std::size_t block_len = 0;
    std::uint64_t total_bits = 0;

    void process_block() {
        std::array<std::uint32_t, 80> w{};
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                   (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 80; ++i)
            w[i] = std::rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t tmp = std::rotl(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = std::rotl(b, 30);
            b = a;
            a = tmp;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        block_len = 0;
    }

    void update(const void* data, std::size_t len) {
        const auto* bytes = static_cast<const std::uint8_t*>(data);
        total_bits += std::uint64_t(len) * 8;
        for (std::size_t i = 0; i < len; ++i) {
            block[block_len++] = bytes[i];
            if (block_len == 64) process_block();
        }
    }

    std::string finish() {
        block[block_len++] = 0x80;
        if (block_len > 56) {
            while (block_len < 64) block[block_len++] = 0;
            process_block();
        }
        while (block_len < 56) block[block_len++] = 0;
        for (int i = 7; i >= 0; --i) block[block_len++] = std::uint8_t(total_bits >> (8 * i));
        process_block();
        static constexpr char hex[] = "0123456789abcdef";
        std::string out;
        out.reserve(40);
        for (std::uint32_t word : h)
            for (int shift = 28; shift >= 0; shift -= 4) out += hex[(word >> shift) & 0xF];
        return out;
    }
};

}  // namespace

std::string git_blob_sha1(std::string_view content) {
    Sha1 sha;
    const std::string header = "blob " + std::to_string(content.size());
    sha.update(header.data(), header.size() + 1);  // include the NUL terminator
    sha.update(content.data(), content.size());
    return sha.finish();
}

std::uint64_t seed_from_env_or(std::uint64_t fallback) {
    const char* env = std::getenv("QRC_SEED");
    if (env == nullptr || *env == '\0') return fallback;
    std::uint64_t value = 0;
    const char* end = env;
    while (*end != '\0') ++end;
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("QRC_SEED must be an unsigned integer");
    return value;
}

}  // namespace qrc

// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/token_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dash {

namespace {

std::uint32_t read_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

// Deterministic standard normal source: Box-Muller over mt19937_64 output.
// std::normal_distribution is implementation-defined, which would break the
// portability of golden files produced from synthetic streams.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = unit_open();   // (0, 1], keeps log() finite
        const double u2 = unit_closed(); // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

private:
    double unit_closed() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double unit_open() { return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

TokenMatrix decode_token_dump(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kDumpHeaderSize) {
        throw DumpError(DumpError::Kind::truncated,
                        "dump truncated: " + std::to_string(bytes.size()) +
                            " bytes, header needs " + std::to_string(kDumpHeaderSize));
    }
    if (std::memcmp(bytes.data(), "DSH1", 4) != 0) {
        throw DumpError(DumpError::Kind::bad_magic, "bad magic: expected \"DSH1\"");
    }
    if (bytes[4] != 1) {
        throw DumpError(DumpError::Kind::bad_version,
                        "unsupported version " + std::to_string(bytes[4]));
    }
    if (bytes[5] != 0) {
        throw DumpError(DumpError::Kind::bad_dtype,
                        "unsupported dtype " + std::to_string(bytes[5]) +
                            " (only 32-bit real is defined)");
    }
    const std::uint32_t n = read_u32_le(bytes.data() + 8);
    const std::uint32_t d = read_u32_le(bytes.data() + 12);
    if (n == 0 || d == 0) {
        throw DumpError(DumpError::Kind::bad_shape,
                        "invalid shape " + std::to_string(n) + "x" + std::to_string(d));
    }
    const std::uint64_t count = static_cast<std::uint64_t>(n) * d;
    const std::uint64_t payload = count * 4;
    if (bytes.size() < kDumpHeaderSize + payload) {
        throw DumpError(DumpError::Kind::truncated,
                        "payload truncated: header declares " + std::to_string(n) + "x" +
                            std::to_string(d) + " but only " +
                            std::to_string(bytes.size() - kDumpHeaderSize) +
                            " payload bytes present");
    }
    if (bytes.size() > kDumpHeaderSize + payload) {
        throw DumpError(DumpError::Kind::trailing_bytes,
                        std::to_string(bytes.size() - kDumpHeaderSize - payload) +
                            " trailing bytes after payload");
    }

    TokenMatrix matrix(n, d);
    const std::uint8_t* p = bytes.data() + kDumpHeaderSize;
    for (std::uint64_t i = 0; i < count; ++i, p += 4) {
        const float value = std::bit_cast<float>(read_u32_le(p));
        if (!std::isfinite(value)) {
            throw DumpError(DumpError::Kind::non_finite,
                            "non-finite value at element " + std::to_string(i));
        }
        matrix.data[i] = value;
    }
    return matrix;
}

std::vector<std::uint8_t> encode_token_dump(const TokenMatrix& matrix) {
    if (!matrix.valid_shape()) {
        throw DumpError(DumpError::Kind::bad_shape, "matrix shape invalid for encoding");
    }
    for (std::size_t i = 0; i < matrix.data.size(); ++i) {
        if (!std::isfinite(matrix.data[i])) {
            throw DumpError(DumpError::Kind::non_finite,
                            "non-finite value at element " + std::to_string(i));
        }
    }
    std::vector<std::uint8_t> out;
    out.reserve(kDumpHeaderSize + matrix.data.size() * 4);
    for (char ch : {'D', 'S', 'H', '1'}) out.push_back(static_cast<std::uint8_t>(ch));
    out.push_back(1);  // version
    out.push_back(0);  // dtype: 32-bit real
    out.push_back(0);
    out.push_back(0);
    append_u32_le(out, static_cast<std::uint32_t>(matrix.rows));
    append_u32_le(out, static_cast<std::uint32_t>(matrix.cols));
    append_u32_le(out, 0);
    for (float value : matrix.data) {
        append_u32_le(out, std::bit_cast<std::uint32_t>(value));
    }
    return out;
}

TokenMatrix read_token_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DumpError(DumpError::Kind::io, "cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw DumpError(DumpError::Kind::io, "read failure on " + path);
    }
    try {
        return decode_token_dump(bytes);
    } catch (const DumpError& e) {
        throw DumpError(e.kind(), path + ": " + e.what());
    }
}

void write_token_dump(const TokenMatrix& matrix, const std::string& path) {
    const std::vector<std::uint8_t> bytes = encode_token_dump(matrix);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DumpError(DumpError::Kind::io, "cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw DumpError(DumpError::Kind::io, "write failure on " + path);
    }
}

AttentionLogits read_attention_dump(const std::string& path) {
    TokenMatrix matrix = read_token_dump(path);
    if (matrix.cols != 1) {
        throw DumpError(DumpError::Kind::bad_shape,
                        path + ": attention dump must have D=1, got D=" +
                            std::to_string(matrix.cols));
    }
    return AttentionLogits{std::move(matrix.data)};
}

void write_attention_dump(const AttentionLogits& logits, const std::string& path) {
    TokenMatrix matrix(logits.values.size(), 1);
    matrix.data = logits.values;
    write_token_dump(matrix, path);
}

void write_mask_dump(std::span<const std::uint8_t> mask, const std::string& path) {
    if (mask.empty()) {
        throw DumpError(DumpError::Kind::bad_shape, "cannot write an empty mask to " + path);
    }
    TokenMatrix matrix(mask.size(), 1);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        matrix.data[i] = mask[i] ? 1.0f : 0.0f;
    }
    write_token_dump(matrix, path);
}

SyntheticStream generate_piecewise(const SyntheticSpec& spec) {
    if (spec.segment_lengths.empty()) {
        throw std::invalid_argument("generate_piecewise: empty segment list");
    }
    for (std::size_t length : spec.segment_lengths) {
        if (length == 0) {
            throw std::invalid_argument("generate_piecewise: segment length must be >= 1");
        }
    }
    if (spec.dim < 2) {
        throw std::invalid_argument(
            "generate_piecewise: dim must be >= 2 to realize a target cosine");
    }
    if (!(spec.inter_segment_cosine >= -1.0 && spec.inter_segment_cosine <= 1.0)) {
        throw std::invalid_argument("generate_piecewise: inter_segment_cosine outside [-1, 1]");
    }
    if (!(spec.noise_scale >= 0.0)) {
        throw std::invalid_argument("generate_piecewise: noise_scale must be nonnegative");
    }

    std::size_t total = 0;
    SyntheticStream stream;
    stream.boundaries.reserve(spec.segment_lengths.size());
    for (std::size_t length : spec.segment_lengths) {
        stream.boundaries.push_back(total);
        total += length;
    }

    // Prototype s sits at angle s * theta on the (axis 0, axis 1) plane, so
    // every adjacent prototype pair realizes the target cosine exactly.
    const double theta = std::acos(spec.inter_segment_cosine);
    stream.tokens = TokenMatrix(total, spec.dim);
    NormalSource noise(spec.seed);

    std::size_t row = 0;
    for (std::size_t s = 0; s < spec.segment_lengths.size(); ++s) {
        const double c0 = std::cos(static_cast<double>(s) * theta);
        const double c1 = std::sin(static_cast<double>(s) * theta);
        for (std::size_t i = 0; i < spec.segment_lengths[s]; ++i, ++row) {
            std::span<float> out = stream.tokens.row(row);
            for (std::size_t d = 0; d < spec.dim; ++d) {
                double value = d == 0 ? c0 : d == 1 ? c1 : 0.0;
                if (spec.noise_scale > 0.0) {
                    value += spec.noise_scale * noise.next();
                }
                out[d] = static_cast<float>(value);
            }
        }
    }
    return stream;
}

}  // namespace dash

// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dash/types.hpp"

namespace dash {

/// Failure raised by the DSH1 container codec. `kind` identifies the exact
/// diagnostic so callers can tell a bad magic from a truncated payload.
class DumpError : public std::runtime_error {
public:
    enum class Kind {
        bad_magic,
        bad_version,
        bad_dtype,
        bad_shape,
        truncated,
        trailing_bytes,
        non_finite,
        io,
    };

    DumpError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// DSH1 container layout (all integers little-endian):
//   bytes  0-3   magic "DSH1"
//   byte   4     version, must be 1
//   byte   5     dtype, must be 0 (32-bit real)
//   bytes  6-7   reserved, written as zero
//   bytes  8-11  u32 N (rows)
//   bytes 12-15  u32 D (cols)
//   bytes 16-19  reserved, written as zero
//   then N*D 32-bit reals, row-major
inline constexpr std::size_t kDumpHeaderSize = 20;

TokenMatrix decode_token_dump(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_token_dump(const TokenMatrix& matrix);

TokenMatrix read_token_dump(const std::string& path);
void write_token_dump(const TokenMatrix& matrix, const std::string& path);

/// Attention logits travel in the same container with D = 1.
AttentionLogits read_attention_dump(const std::string& path);
void write_attention_dump(const AttentionLogits& logits, const std::string& path);

/// Retention masks are emitted as D = 1 dumps with values in {0.0, 1.0}.
void write_mask_dump(std::span<const std::uint8_t> mask, const std::string& path);

/// Recipe for a piecewise-coherent synthetic stream with known boundaries.
/// Segment prototypes are unit vectors on a fixed plane spaced so that each
/// adjacent pair realizes `inter_segment_cosine` exactly.
struct SyntheticSpec {
    std::vector<std::size_t> segment_lengths;
    double inter_segment_cosine = 0.0;
    double noise_scale = 0.0;
    std::size_t dim = 8;
    std::uint64_t seed = 0;
};

struct SyntheticStream {
    TokenMatrix tokens;
    std::vector<std::size_t> boundaries;  // 0-based segment starts, beginning at 0
};

SyntheticStream generate_piecewise(const SyntheticSpec& spec);

}  // namespace dash

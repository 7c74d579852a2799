// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dash {

/// Denominator guard used by every normalization in the pipeline.
inline constexpr double kEpsilon = 1e-8;

/// Row-major N x D embedding sequence (audio tokens or flattened video tokens).
/// Values are 32-bit reals; all derived arithmetic runs in double.
struct TokenMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;  // rows * cols, row-major

    TokenMatrix() = default;
    TokenMatrix(std::size_t n, std::size_t d) : rows(n), cols(d), data(n * d, 0.0f) {}

    std::span<const float> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<float> row(std::size_t r) { return {data.data() + r * cols, cols}; }

    bool valid_shape() const { return rows >= 1 && cols >= 1 && data.size() == rows * cols; }
};

/// F frames of K tokens each; tokens.rows == frames * tokens_per_frame.
struct FrameGrid {
    std::size_t frames = 0;
    std::size_t tokens_per_frame = 0;
    TokenMatrix tokens;

    bool valid_shape() const {
        return frames >= 1 && tokens_per_frame >= 1 && tokens.valid_shape() &&
               tokens.rows == frames * tokens_per_frame;
    }
};

/// Pre-aggregated encoder attention logits, one scalar per audio token.
struct AttentionLogits {
    std::vector<float> values;
};

/// Half-open index interval [lo, hi).
struct IndexInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;

    std::size_t size() const { return hi > lo ? hi - lo : 0; }
    bool empty() const { return hi <= lo; }
    bool operator==(const IndexInterval&) const = default;
};

}  // namespace dash

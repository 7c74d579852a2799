// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dash/pipeline.hpp"
#include "dash/types.hpp"

namespace dash::test {

using Rng = std::mt19937_64;

inline double unit_draw(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double draw(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_draw(rng);
}

inline std::size_t draw_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline TokenMatrix random_matrix(Rng& rng, std::size_t n, std::size_t d, double lo = -1.0,
                                 double hi = 1.0) {
    TokenMatrix m(n, d);
    for (float& v : m.data) v = static_cast<float>(draw(rng, lo, hi));
    return m;
}

inline AttentionLogits random_logits(Rng& rng, std::size_t n, double lo = -2.0, double hi = 6.0) {
    AttentionLogits logits;
    logits.values.resize(n);
    for (float& v : logits.values) v = static_cast<float>(draw(rng, lo, hi));
    return logits;
}

inline FrameGrid random_grid(Rng& rng, std::size_t frames, std::size_t tokens_per_frame,
                             std::size_t d) {
    FrameGrid grid;
    grid.frames = frames;
    grid.tokens_per_frame = tokens_per_frame;
    grid.tokens = random_matrix(rng, frames * tokens_per_frame, d);
    return grid;
}

// Similarity profile with entry 0 fixed at 1 and the rest uniform in [-1, 1].
inline std::vector<double> random_sims(Rng& rng, std::size_t n) {
    std::vector<double> sims(n, 1.0);
    for (std::size_t t = 1; t < n; ++t) sims[t] = draw(rng, -1.0, 1.0);
    return sims;
}

// Sorted boundary positions with sentinels {0, n} and random inner strengths.
inline BoundarySet random_boundary_set(Rng& rng, std::size_t n, std::size_t max_step) {
    BoundarySet set;
    set.positions.push_back(0);
    std::size_t pos = 0;
    while (true) {
        pos += draw_index(rng, 1, max_step);
        if (pos >= n) break;
        set.positions.push_back(pos);
        set.strengths.push_back(draw(rng, 0.0, 1.0));
    }
    set.positions.push_back(n);
    return set;
}

inline WindowInput random_window(Rng& rng, std::size_t max_audio = 120,
                                 std::size_t max_frames = 8, std::size_t max_k = 16,
                                 std::size_t max_dim = 24) {
    WindowInput input;
    const std::size_t n_a = draw_index(rng, 2, max_audio);
    const std::size_t d = draw_index(rng, 4, max_dim);
    input.audio = random_matrix(rng, n_a, d);
    input.attn = random_logits(rng, n_a);
    input.video = random_grid(rng, draw_index(rng, 2, max_frames), draw_index(rng, 4, max_k), d);
    return input;
}

}  // namespace dash::test

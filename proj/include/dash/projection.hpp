// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "dash/boundary.hpp"
#include "dash/types.hpp"

namespace dash {

/// Refined video segmentation. `boundaries` runs from 0 to n_v inclusive;
/// every segment is at least 2K tokens long (unless n_v itself is smaller, in
/// which case the map is the single segment [0, n_v)). `audio_ranges` holds
/// the inverse-ratio audio interval for each segment; together they tile
/// [0, n_a) without overlap.
struct SegmentMap {
    std::vector<std::size_t> boundaries;
    std::vector<double> strengths;            // one per inner boundary
    std::vector<IndexInterval> audio_ranges;  // one per segment

    std::size_t segment_count() const { return boundaries.size() >= 2 ? boundaries.size() - 1 : 0; }
    IndexInterval segment(std::size_t i) const { return {boundaries[i], boundaries[i + 1]}; }
};

/// Scales audio boundaries onto video token indices: b_v = floor(b_a * n_v / n_a).
/// The result is deduplicated (collisions keep the larger strength), sorted,
/// clamped to [0, n_v], and always contains the sentinels 0 and n_v.
BoundarySet project_boundaries(const BoundarySet& audio_set, std::size_t n_a, std::size_t n_v);

/// Greedy strength-descending refinement: starting from {0, n_v}, an inner
/// candidate is accepted iff both adjacent gaps are >= 2 * tokens_per_frame.
/// Ties in strength are broken toward the smaller video index.
SegmentMap refine_boundaries(const BoundarySet& raw, std::size_t n_v, std::size_t tokens_per_frame,
                             std::size_t n_a);

/// Inverse ratio map of a video segment back onto audio indices; the final
/// segment (hi == n_v) is forced to end at n_a.
IndexInterval audio_range_of_segment(IndexInterval segment, std::size_t n_a, std::size_t n_v);

}  // namespace dash

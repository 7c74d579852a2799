// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dash/projection.hpp"
#include "dash/scoring.hpp"
#include "dash/types.hpp"

namespace dash {

/// Knobs for boundary-aware per-segment compression.
struct CompressionParams {
    double rho_v = 0.75;      // base video compression ratio; 0 disables compression
    double lambda_r = 0.1;    // adaptation strength
    double clamp_lo = 0.1;    // adapted-ratio clamp range
    double clamp_hi = 0.95;
    double protection = 0.3;  // boundary frame protection factor
};

/// Per-segment compression decisions: the adapted ratio, the frames the
/// segment owns, and the per-frame retention after boundary protection.
struct SegmentCompressionPlan {
    IndexInterval segment;      // video token range
    IndexInterval frame_range;  // frames owned by this segment
    IndexInterval audio_range;
    double audio_retention = 0.5;  // fraction of audio tokens kept in audio_range
    double rho_v = 0.0;            // adapted compression ratio for this segment
    std::vector<double> frame_retention;                         // r_f per owned frame
    std::vector<std::pair<std::size_t, double>> boundary_frames; // (frame, strength)
};

struct VideoRetention {
    std::size_t frames = 0;
    std::size_t tokens_per_frame = 0;
    std::vector<std::uint8_t> mask;  // frames * tokens_per_frame
    std::size_t kept_count = 0;
};

/// Fraction of audio tokens kept inside `audio_range`; an empty range yields
/// the neutral 0.5.
double segment_audio_retention(const AudioRetention& audio_mask, IndexInterval audio_range);

/// clip(rho_v + lambda_r * (0.5 - m_bar), lo, hi).
double adaptive_ratio(double rho_v, double m_bar, double lambda_r, double lo = 0.1,
                      double hi = 0.95);

/// r_s + (1 - r_s) * protection * p_f; never below r_s.
double boundary_frame_retention(double r_s, double p_f, double protection = 0.3);

/// Frames whose first token lies in `segment`: [ceil(lo/K), ceil(hi/K)).
IndexInterval frames_of_segment(IndexInterval segment, std::size_t tokens_per_frame);

/// Density pruning: local density of a token is exp(-mean squared distance to
/// its k = max(1, floor(sqrt(K))) nearest neighbors) on L2-normalized tokens;
/// the K - keep highest-density tokens are dropped, ties keep the lower index.
/// Returns the kept indices sorted ascending.
std::vector<std::size_t> spatial_prune_frame(const TokenMatrix& frame_tokens, std::size_t keep);

/// Temporal pruning: drops the K - keep tokens most cosine-similar to the
/// positionally aligned token of the previous frame, ties keep the lower index.
std::vector<std::size_t> temporal_prune_frame(const TokenMatrix& frame,
                                              const TokenMatrix& prev_frame, std::size_t keep);

/// Builds one plan per segment of `map`. Boundary frames are floor(b/K) and
/// the frame after it for every inner boundary b, protected with the
/// boundary's strength. With params.rho_v == 0 compression is disabled and
/// every frame retains everything.
std::vector<SegmentCompressionPlan> build_compression_plans(const SegmentMap& map,
                                                            const AudioRetention& audio_mask,
                                                            std::size_t frames,
                                                            std::size_t tokens_per_frame,
                                                            const CompressionParams& params);

/// Interleaved spatial-temporal pruning over the frames owned by `plan`:
/// even offsets within the segment use spatial pruning, odd offsets temporal
/// pruning against the original previous frame. Per-frame keep count is
/// max(1, round(r_f * K)). Writes kept bits into `out`.
void compress_segment(const FrameGrid& video, const SegmentCompressionPlan& plan,
                      VideoRetention& out);

}  // namespace dash

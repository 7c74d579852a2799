// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/video_compress.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "math_detail.hpp"

namespace dash {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw std::invalid_argument(message);
}

std::vector<std::size_t> identity_indices(std::size_t n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
}

// Keep the `keep` lowest-keyed indices, ties toward the lower index.
std::vector<std::size_t> keep_lowest(const std::vector<double>& key, std::size_t keep) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        return a < b;
    });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    return order;
}

TokenMatrix frame_tokens(const FrameGrid& video, std::size_t frame) {
    const std::size_t k = video.tokens_per_frame;
    TokenMatrix m(k, video.tokens.cols);
    std::copy_n(video.tokens.data.begin() + frame * k * video.tokens.cols, k * video.tokens.cols,
                m.data.begin());
    return m;
}

}  // namespace

double segment_audio_retention(const AudioRetention& audio_mask, IndexInterval audio_range) {
    if (audio_range.empty()) {
        std::cerr << "dash: segment_audio_retention: empty audio range, using neutral 0.5\n";
        return 0.5;
    }
    require(audio_range.hi <= audio_mask.mask.size(),
            "segment_audio_retention: range outside the audio mask");
    std::size_t kept = 0;
    for (std::size_t i = audio_range.lo; i < audio_range.hi; ++i) {
        if (audio_mask.mask[i]) ++kept;
    }
    return static_cast<double>(kept) / static_cast<double>(audio_range.size());
}

double adaptive_ratio(double rho_v, double m_bar, double lambda_r, double lo, double hi) {
    require(std::isfinite(rho_v) && std::isfinite(m_bar) && std::isfinite(lambda_r),
            "adaptive_ratio: inputs must be finite");
    require(lo <= hi, "adaptive_ratio: invalid clamp range");
    return std::clamp(rho_v + lambda_r * (0.5 - m_bar), lo, hi);
}

double boundary_frame_retention(double r_s, double p_f, double protection) {
    require(r_s >= 0.0 && r_s <= 1.0, "boundary_frame_retention: r_s outside [0, 1]");
    require(p_f >= 0.0 && p_f <= 1.0, "boundary_frame_retention: p_f outside [0, 1]");
    require(protection >= 0.0 && protection <= 1.0,
            "boundary_frame_retention: protection outside [0, 1]");
    return r_s + (1.0 - r_s) * protection * p_f;
}

IndexInterval frames_of_segment(IndexInterval segment, std::size_t tokens_per_frame) {
    require(tokens_per_frame >= 1, "frames_of_segment: tokens_per_frame must be >= 1");
    const std::size_t k = tokens_per_frame;
    return {(segment.lo + k - 1) / k, (segment.hi + k - 1) / k};
}

std::vector<std::size_t> spatial_prune_frame(const TokenMatrix& frame_tokens, std::size_t keep) {
    require(frame_tokens.valid_shape(), "spatial_prune_frame: invalid frame matrix");
    require(keep >= 1, "spatial_prune_frame: keep must be >= 1");
    const std::size_t k = frame_tokens.rows;
    const std::size_t d = frame_tokens.cols;
    if (keep >= k) return identity_indices(k);

    std::vector<double> normalized(k * d, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::span<const float> row = frame_tokens.row(i);
        const double norm = detail::l2_norm(row);
        if (norm == 0.0) continue;
        for (std::size_t c = 0; c < d; ++c) normalized[i * d + c] = row[c] / norm;
    }
    const auto row_of = [&](std::size_t i) {
        return std::span<const double>(normalized.data() + i * d, d);
    };

    const std::size_t neighbors = std::min<std::size_t>(
        k - 1, std::max<std::size_t>(1, static_cast<std::size_t>(
                                            std::floor(std::sqrt(static_cast<double>(k))))));

    std::vector<double> density(k);
    std::vector<double> dists;
    dists.reserve(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        dists.clear();
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            dists.push_back(detail::squared_distance(row_of(i), row_of(j)));
        }
        std::nth_element(dists.begin(), dists.begin() + (neighbors - 1), dists.end());
        std::sort(dists.begin(), dists.begin() + neighbors);
        double mean = 0.0;
        for (std::size_t j = 0; j < neighbors; ++j) mean += dists[j];
        mean /= static_cast<double>(neighbors);
        density[i] = std::exp(-mean);
    }
    return keep_lowest(density, keep);
}

std::vector<std::size_t> temporal_prune_frame(const TokenMatrix& frame,
                                              const TokenMatrix& prev_frame, std::size_t keep) {
    require(frame.valid_shape() && prev_frame.valid_shape(),
            "temporal_prune_frame: invalid frame matrix");
    require(frame.rows == prev_frame.rows && frame.cols == prev_frame.cols,
            "temporal_prune_frame: frame shapes differ");
    require(keep >= 1, "temporal_prune_frame: keep must be >= 1");
    const std::size_t k = frame.rows;
    if (keep >= k) return identity_indices(k);

    std::vector<double> similarity(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::span<const float> a = frame.row(i);
        const std::span<const float> b = prev_frame.row(i);
        if (std::equal(a.begin(), a.end(), b.begin())) {
            similarity[i] = 1.0;  // unchanged token, exactly redundant
            continue;
        }
        const double norms = detail::l2_norm(a) * detail::l2_norm(b);
        similarity[i] = norms == 0.0 ? 0.0 : std::clamp(detail::dot(a, b) / norms, -1.0, 1.0);
    }
    return keep_lowest(similarity, keep);
}

std::vector<SegmentCompressionPlan> build_compression_plans(const SegmentMap& map,
                                                            const AudioRetention& audio_mask,
                                                            std::size_t frames,
                                                            std::size_t tokens_per_frame,
                                                            const CompressionParams& params) {
    require(map.segment_count() >= 1, "build_compression_plans: empty segment map");
    require(map.boundaries.back() == frames * tokens_per_frame,
            "build_compression_plans: segment map does not cover the video grid");
    require(map.audio_ranges.size() == map.segment_count(),
            "build_compression_plans: one audio range per segment expected");

    // Boundary frames: floor(b / K) and the frame after it, strongest wins.
    std::map<std::size_t, double> protected_frames;
    for (std::size_t i = 1; i + 1 < map.boundaries.size(); ++i) {
        const std::size_t frame = map.boundaries[i] / tokens_per_frame;
        const double strength = map.strengths[i - 1];
        for (std::size_t f : {frame, frame + 1}) {
            if (f >= frames) continue;
            auto [it, inserted] = protected_frames.try_emplace(f, strength);
            if (!inserted) it->second = std::max(it->second, strength);
        }
    }

    std::vector<SegmentCompressionPlan> plans;
    plans.reserve(map.segment_count());
    for (std::size_t s = 0; s < map.segment_count(); ++s) {
        SegmentCompressionPlan plan;
        plan.segment = map.segment(s);
        plan.frame_range = frames_of_segment(plan.segment, tokens_per_frame);
        plan.audio_range = map.audio_ranges[s];
        plan.audio_retention = segment_audio_retention(audio_mask, plan.audio_range);
        // rho_v == 0 means compression is off; the adapted ratio's clamp floor
        // would otherwise force pruning even when none was requested.
        plan.rho_v = params.rho_v == 0.0
                         ? 0.0
                         : adaptive_ratio(params.rho_v, plan.audio_retention, params.lambda_r,
                                          params.clamp_lo, params.clamp_hi);
        const double r_s = 1.0 - plan.rho_v;
        plan.frame_retention.reserve(plan.frame_range.size());
        for (std::size_t f = plan.frame_range.lo; f < plan.frame_range.hi; ++f) {
            const auto it = protected_frames.find(f);
            if (it == protected_frames.end()) {
                plan.frame_retention.push_back(r_s);
            } else {
                plan.frame_retention.push_back(
                    boundary_frame_retention(r_s, it->second, params.protection));
                plan.boundary_frames.emplace_back(f, it->second);
            }
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

void compress_segment(const FrameGrid& video, const SegmentCompressionPlan& plan,
                      VideoRetention& out) {
    require(video.valid_shape(), "compress_segment: invalid video grid");
    require(plan.frame_range.hi <= video.frames, "compress_segment: plan outside the grid");
    require(plan.frame_retention.size() == plan.frame_range.size(),
            "compress_segment: one retention value per owned frame expected");
    const std::size_t k = video.tokens_per_frame;
    require(out.mask.size() == video.frames * k && out.tokens_per_frame == k,
            "compress_segment: output mask shape mismatch");

    for (std::size_t offset = 0; offset < plan.frame_range.size(); ++offset) {
        const std::size_t f = plan.frame_range.lo + offset;
        const double r_f = plan.frame_retention[offset];
        const std::size_t keep = std::min<std::size_t>(
            k, std::max<std::size_t>(
                   1, static_cast<std::size_t>(std::lround(r_f * static_cast<double>(k)))));

        const TokenMatrix current = frame_tokens(video, f);
        std::vector<std::size_t> kept;
        if (offset % 2 == 0 || f == 0) {
            kept = spatial_prune_frame(current, keep);
        } else {
            // Temporal pruning compares against the original previous frame,
            // never a pruned version of it.
            kept = temporal_prune_frame(current, frame_tokens(video, f - 1), keep);
        }
        for (std::size_t idx : kept) out.mask[f * k + idx] = 1;
        out.kept_count += kept.size();
    }
}

}  // namespace dash

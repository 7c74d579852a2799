// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/projection.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace dash {

namespace {

void validate_boundary_set(const BoundarySet& set, std::size_t n, const char* where) {
    const std::string prefix = std::string(where) + ": ";
    if (set.positions.size() < 2) {
        throw std::invalid_argument(prefix + "boundary set needs the sentinels 0 and N");
    }
    if (set.positions.front() != 0 || set.positions.back() != n) {
        throw std::invalid_argument(prefix + "boundary sentinels must be 0 and " +
                                    std::to_string(n));
    }
    for (std::size_t i = 1; i < set.positions.size(); ++i) {
        if (set.positions[i] <= set.positions[i - 1]) {
            throw std::invalid_argument(prefix + "positions must be strictly increasing");
        }
    }
    if (set.strengths.size() != set.positions.size() - 2) {
        throw std::invalid_argument(prefix + "one strength per inner boundary expected");
    }
}

}  // namespace

BoundarySet project_boundaries(const BoundarySet& audio_set, std::size_t n_a, std::size_t n_v) {
    if (n_a < 1 || n_v < 1) {
        throw std::invalid_argument("project_boundaries: n_a and n_v must be >= 1");
    }
    validate_boundary_set(audio_set, n_a, "project_boundaries");

    // Inner projections; collisions keep the larger strength, collisions with
    // a sentinel dissolve into it.
    std::map<std::size_t, double> inner;
    for (std::size_t i = 1; i + 1 < audio_set.positions.size(); ++i) {
        const std::uint64_t scaled =
            static_cast<std::uint64_t>(audio_set.positions[i]) * n_v / n_a;
        const std::size_t v = static_cast<std::size_t>(std::min<std::uint64_t>(scaled, n_v));
        if (v == 0 || v == n_v) continue;
        auto [it, inserted] = inner.try_emplace(v, audio_set.strengths[i - 1]);
        if (!inserted) it->second = std::max(it->second, audio_set.strengths[i - 1]);
    }

    BoundarySet video_set;
    video_set.positions.reserve(inner.size() + 2);
    video_set.positions.push_back(0);
    for (const auto& [pos, strength] : inner) {
        video_set.positions.push_back(pos);
        video_set.strengths.push_back(strength);
    }
    video_set.positions.push_back(n_v);
    return video_set;
}

SegmentMap refine_boundaries(const BoundarySet& raw, std::size_t n_v,
                             std::size_t tokens_per_frame, std::size_t n_a) {
    if (tokens_per_frame < 1) {
        throw std::invalid_argument("refine_boundaries: tokens_per_frame must be >= 1");
    }
    if (n_a < 1) {
        throw std::invalid_argument("refine_boundaries: n_a must be >= 1");
    }
    validate_boundary_set(raw, n_v, "refine_boundaries");

    const std::size_t min_len = 2 * tokens_per_frame;

    struct Candidate {
        std::size_t pos;
        double strength;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(raw.inner_count());
    for (std::size_t i = 1; i + 1 < raw.positions.size(); ++i) {
        candidates.push_back({raw.positions[i], raw.strengths[i - 1]});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        return a.pos < b.pos;
    });

    std::set<std::size_t> accepted{0, n_v};
    std::map<std::size_t, double> strength_of;
    for (const Candidate& c : candidates) {
        const auto right = accepted.lower_bound(c.pos);
        const auto left = std::prev(right);
        if (c.pos - *left >= min_len && *right - c.pos >= min_len) {
            accepted.insert(c.pos);
            strength_of.emplace(c.pos, c.strength);
        }
    }

    SegmentMap map;
    map.boundaries.assign(accepted.begin(), accepted.end());
    map.strengths.reserve(strength_of.size());
    for (std::size_t i = 1; i + 1 < map.boundaries.size(); ++i) {
        map.strengths.push_back(strength_of.at(map.boundaries[i]));
    }
    map.audio_ranges.reserve(map.segment_count());
    for (std::size_t s = 0; s < map.segment_count(); ++s) {
        map.audio_ranges.push_back(audio_range_of_segment(map.segment(s), n_a, n_v));
    }
    return map;
}

IndexInterval audio_range_of_segment(IndexInterval segment, std::size_t n_a, std::size_t n_v) {
    if (n_a < 1 || n_v < 1) {
        throw std::invalid_argument("audio_range_of_segment: n_a and n_v must be >= 1");
    }
    if (segment.hi > n_v || segment.lo > segment.hi) {
        throw std::invalid_argument("audio_range_of_segment: segment outside [0, n_v]");
    }
    const std::size_t lo =
        static_cast<std::size_t>(static_cast<std::uint64_t>(segment.lo) * n_a / n_v);
    const std::size_t hi =
        segment.hi == n_v
            ? n_a
            : static_cast<std::size_t>(static_cast<std::uint64_t>(segment.hi) * n_a / n_v);
    return {lo, hi};
}

}  // namespace dash

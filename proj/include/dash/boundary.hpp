// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dash/types.hpp"

namespace dash {

/// Adjacent-token similarity metrics. `cosine` is the default; the others are
/// ablation baselines that plug into the same thresholding interface.
enum class SimilarityMetric {
    cosine,
    dot_product,   // raw inner product, min-max normalized to [-1, 1]
    change_rate,   // 1 - |a_t - a_{t-1}| / (max delta + eps)
    random,        // seeded uniform draws in [-1, 1]
};

SimilarityMetric parse_metric(std::string_view name);
std::string metric_name(SimilarityMetric metric);

/// Per-position similarity and boundary probability series. Position 0 has no
/// predecessor: sims[0] is stored as 1.0 and probs[0] is forced to 1.
struct BoundaryProfile {
    std::vector<double> sims;
    std::vector<double> probs;
};

/// Detected boundary positions with sentinels 0 and N. `strengths[i]` is the
/// boundary probability of the inner position `positions[i + 1]`.
struct BoundarySet {
    std::vector<std::size_t> positions;
    std::vector<double> strengths;

    std::size_t inner_count() const { return positions.size() >= 2 ? positions.size() - 2 : 0; }
    std::size_t token_count() const { return positions.empty() ? 0 : positions.back(); }
};

/// Similarity of each token to its predecessor; entry 0 is fixed at 1.0.
/// Under the cosine metric every token must have positive norm.
std::vector<double> adjacent_similarity(const TokenMatrix& tokens, SimilarityMetric metric,
                                        std::uint64_t seed = 0, double eps = kEpsilon);

/// probs[0] = 1; probs[t] = clip((1 - sims[t]) / 2, 0, 1) for t >= 1.
std::vector<double> boundary_probabilities(const std::vector<double>& sims);

/// Left-to-right scan: position t (t >= 1) is a boundary iff sims[t] < tau and
/// the gap to the last accepted boundary is at least c_min.
BoundarySet detect_boundaries(const std::vector<double>& sims, const std::vector<double>& probs,
                              double tau, std::size_t c_min);

}  // namespace dash

// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "math_detail.hpp"

namespace dash {

SimilarityMetric parse_metric(std::string_view name) {
    if (name == "cosine") return SimilarityMetric::cosine;
    if (name == "dot") return SimilarityMetric::dot_product;
    if (name == "change-rate") return SimilarityMetric::change_rate;
    if (name == "random") return SimilarityMetric::random;
    throw std::invalid_argument("unknown similarity metric '" + std::string(name) +
                                "' (expected cosine|dot|change-rate|random)");
}

std::string metric_name(SimilarityMetric metric) {
    switch (metric) {
        case SimilarityMetric::cosine: return "cosine";
        case SimilarityMetric::dot_product: return "dot";
        case SimilarityMetric::change_rate: return "change-rate";
        case SimilarityMetric::random: return "random";
    }
    throw std::invalid_argument("invalid similarity metric value");
}

std::vector<double> adjacent_similarity(const TokenMatrix& tokens, SimilarityMetric metric,
                                        std::uint64_t seed, double eps) {
    if (!tokens.valid_shape()) {
        throw std::invalid_argument("adjacent_similarity: invalid token matrix");
    }
    const std::size_t n = tokens.rows;
    std::vector<double> sims(n, 1.0);

    switch (metric) {
        case SimilarityMetric::cosine: {
            std::vector<double> norms(n);
            for (std::size_t i = 0; i < n; ++i) {
                norms[i] = detail::l2_norm(tokens.row(i));
                if (norms[i] == 0.0) {
                    throw std::invalid_argument("adjacent_similarity: degenerate token " +
                                                std::to_string(i) +
                                                " has zero norm under the cosine metric");
                }
            }
            for (std::size_t t = 1; t < n; ++t) {
                const double cosv =
                    detail::dot(tokens.row(t - 1), tokens.row(t)) / (norms[t - 1] * norms[t]);
                sims[t] = std::clamp(cosv, -1.0, 1.0);
            }
            break;
        }
        case SimilarityMetric::dot_product: {
            if (n >= 2) {
                std::vector<double> raw(n, 0.0);
                double lo = 0.0;
                double hi = 0.0;
                for (std::size_t t = 1; t < n; ++t) {
                    raw[t] = detail::dot(tokens.row(t - 1), tokens.row(t));
                    if (t == 1 || raw[t] < lo) lo = raw[t];
                    if (t == 1 || raw[t] > hi) hi = raw[t];
                }
                for (std::size_t t = 1; t < n; ++t) {
                    sims[t] = -1.0 + 2.0 * (raw[t] - lo) / (hi - lo + eps);
                }
            }
            break;
        }
        case SimilarityMetric::change_rate: {
            if (n >= 2) {
                std::vector<double> delta(n, 0.0);
                double max_delta = 0.0;
                for (std::size_t t = 1; t < n; ++t) {
                    delta[t] = std::sqrt(detail::squared_distance(tokens.row(t), tokens.row(t - 1)));
                    max_delta = std::max(max_delta, delta[t]);
                }
                for (std::size_t t = 1; t < n; ++t) {
                    sims[t] = 1.0 - delta[t] / (max_delta + eps);
                }
            }
            break;
        }
        case SimilarityMetric::random: {
            std::mt19937_64 rng(seed);
            for (std::size_t t = 1; t < n; ++t) {
                sims[t] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
            }
            break;
        }
    }
    return sims;
}

std::vector<double> boundary_probabilities(const std::vector<double>& sims) {
    if (sims.empty()) {
        throw std::invalid_argument("boundary_probabilities: empty similarity vector");
    }
    std::vector<double> probs(sims.size());
    probs[0] = 1.0;  // the first token is always a boundary
    for (std::size_t t = 1; t < sims.size(); ++t) {
        if (!std::isfinite(sims[t])) {
            throw std::invalid_argument("boundary_probabilities: non-finite similarity at " +
                                        std::to_string(t));
        }
        probs[t] = std::clamp((1.0 - sims[t]) / 2.0, 0.0, 1.0);
    }
    return probs;
}

BoundarySet detect_boundaries(const std::vector<double>& sims, const std::vector<double>& probs,
                              double tau, std::size_t c_min) {
    if (sims.empty() || sims.size() != probs.size()) {
        throw std::invalid_argument("detect_boundaries: sims/probs must be nonempty and aligned");
    }
    if (!(tau > -1.0 && tau < 1.0)) {
        throw std::invalid_argument("detect_boundaries: tau must lie in (-1, 1)");
    }
    if (c_min < 1) {
        throw std::invalid_argument("detect_boundaries: c_min must be >= 1");
    }

    const std::size_t n = sims.size();
    BoundarySet set;
    set.positions.push_back(0);
    std::size_t t_last = 0;
    for (std::size_t t = 1; t < n; ++t) {
        if (sims[t] < tau && t - t_last >= c_min) {
            set.positions.push_back(t);
            set.strengths.push_back(probs[t]);
            t_last = t;
        }
    }
    set.positions.push_back(n);
    return set;
}

}  // namespace dash

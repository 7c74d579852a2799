// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "math_detail.hpp"

namespace dash {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw std::invalid_argument(message);
}

}  // namespace

std::vector<double> boundary_signal(const std::vector<double>& probs, double eps) {
    require(!probs.empty(), "boundary_signal: empty probability vector");
    double max_prob = 0.0;
    for (double p : probs) {
        require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
                "boundary_signal: probabilities must lie in [0, 1]");
        max_prob = std::max(max_prob, p);
    }
    std::vector<double> signal(probs.size());
    for (std::size_t t = 0; t < probs.size(); ++t) {
        signal[t] = probs[t] / (max_prob + eps);
    }
    return signal;
}

TokenMatrix select_low_variance_channels(const TokenMatrix& tokens, double ratio) {
    require(tokens.valid_shape(), "select_low_variance_channels: invalid token matrix");
    require(ratio >= 0.0 && ratio <= 1.0, "select_low_variance_channels: ratio outside [0, 1]");

    const std::size_t n = tokens.rows;
    const std::size_t d = tokens.cols;
    std::size_t keep = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(d)));
    keep = std::clamp<std::size_t>(keep, 1, d);

    // Population variance per channel, two-pass.
    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::span<const float> row = tokens.row(r);
        for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<double> variance(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::span<const float> row = tokens.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            const double delta = row[c] - mean[c];
            variance[c] += delta * delta;
        }
    }
    for (double& v : variance) v /= static_cast<double>(n);

    std::vector<std::size_t> channels(d);
    std::iota(channels.begin(), channels.end(), std::size_t{0});
    std::sort(channels.begin(), channels.end(), [&](std::size_t a, std::size_t b) {
        if (variance[a] != variance[b]) return variance[a] < variance[b];
        return a < b;
    });
    channels.resize(keep);
    std::sort(channels.begin(), channels.end());

    TokenMatrix selected(n, keep);
    for (std::size_t r = 0; r < n; ++r) {
        const std::span<const float> row = tokens.row(r);
        std::span<float> out = selected.row(r);
        for (std::size_t c = 0; c < keep; ++c) out[c] = row[channels[c]];
    }
    return selected;
}

std::vector<double> multiscale_uniqueness(const TokenMatrix& selected,
                                          std::span<const double> bandwidths, double eps) {
    require(selected.valid_shape(), "multiscale_uniqueness: invalid token matrix");
    require(!bandwidths.empty(), "multiscale_uniqueness: empty bandwidth set");
    for (double a : bandwidths) {
        require(std::isfinite(a) && a > 0.0, "multiscale_uniqueness: bandwidths must be positive");
    }

    const std::size_t n = selected.rows;
    const std::size_t d = selected.cols;

    std::vector<double> normalized(n * d, 0.0);
    std::vector<bool> zero_row(n, false);
    for (std::size_t r = 0; r < n; ++r) {
        const std::span<const float> row = selected.row(r);
        const double norm = detail::l2_norm(row);
        if (norm == 0.0) {
            zero_row[r] = true;
            continue;
        }
        for (std::size_t c = 0; c < d; ++c) normalized[r * d + c] = row[c] / norm;
    }

    std::vector<double> center(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) center[c] += normalized[r * d + c];
    }
    for (double& c : center) c /= static_cast<double>(n);

    std::vector<double> density(n, 0.0);
    double max_density = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const std::span<const double> row(normalized.data() + r * d, d);
        const double dist2 = detail::squared_distance(row, std::span<const double>(center));
        double g = 0.0;
        for (double a : bandwidths) g += std::exp(-dist2 / (2.0 * a));
        density[r] = g;
        max_density = std::max(max_density, g);
    }

    std::vector<double> uniqueness(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (zero_row[r]) {
            std::cerr << "dash: multiscale_uniqueness: zero-norm token " << r
                      << " treated as maximally distinct\n";
            uniqueness[r] = 1.0;
            continue;
        }
        uniqueness[r] = std::clamp(1.0 - density[r] / (max_density + eps), 0.0, 1.0);
    }
    return uniqueness;
}

std::vector<double> attention_signal(const AttentionLogits& logits, double eps) {
    require(!logits.values.empty(), "attention_signal: empty logits");
    double min_logit = logits.values[0];
    for (float v : logits.values) {
        require(std::isfinite(v), "attention_signal: non-finite logit");
        min_logit = std::min(min_logit, static_cast<double>(v));
    }
    const double shift = min_logit < 0.0 ? -min_logit : 0.0;
    double max_shifted = 0.0;
    for (float v : logits.values) max_shifted = std::max(max_shifted, v + shift);

    std::vector<double> signal(logits.values.size());
    for (std::size_t t = 0; t < logits.values.size(); ++t) {
        signal[t] = (logits.values[t] + shift) / (max_shifted + eps);
    }
    return signal;
}

std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    k = std::min(k, scores.size());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::size_t keep_count(double rho, std::size_t n) {
    require(rho >= 0.0 && rho < 1.0, "keep_count: rho must lie in [0, 1)");
    const long double kept =
        (1.0L - static_cast<long double>(rho)) * static_cast<long double>(n);
    return static_cast<std::size_t>(std::floor(kept));
}

FusionOutcome fuse_and_select(const std::vector<double>& s_bnd, const std::vector<double>& s_uniq,
                              const std::vector<double>& s_attn, const FusionWeights& weights,
                              double rho_a, bool attention_only) {
    const std::size_t n = s_attn.size();
    require(n >= 1, "fuse_and_select: empty signals");
    require(s_bnd.size() == n && s_uniq.size() == n, "fuse_and_select: signal lengths differ");
    require(weights.w_b >= 0.0 && weights.w_u >= 0.0 && weights.w_a >= 0.0,
            "fuse_and_select: weights must be nonnegative");
    require(weights.w_b + weights.w_u + weights.w_a > 0.0,
            "fuse_and_select: weights must not all be zero");

    FusionOutcome out;
    out.scores.s_bnd = s_bnd;
    out.scores.s_uniq = s_uniq;
    out.scores.s_attn = s_attn;
    out.scores.fused.resize(n);
    if (attention_only) {
        out.scores.fused = s_attn;
    } else {
        for (std::size_t t = 0; t < n; ++t) {
            out.scores.fused[t] =
                weights.w_b * s_bnd[t] + weights.w_u * s_uniq[t] + weights.w_a * s_attn[t];
        }
    }

    std::size_t n_keep = keep_count(rho_a, n);
    if (n_keep == 0) {
        std::cerr << "dash: fuse_and_select: keep count is 0, retaining the top-scored token\n";
        n_keep = 1;
    }

    const std::vector<std::size_t> selected = top_k_indices(out.scores.fused, n_keep);
    const std::vector<std::size_t> attn_selected = top_k_indices(s_attn, n_keep);

    out.retention.mask.assign(n, 0);
    for (std::size_t idx : selected) out.retention.mask[idx] = 1;
    out.retention.kept_count = selected.size();

    std::set_difference(selected.begin(), selected.end(), attn_selected.begin(),
                        attn_selected.end(), std::back_inserter(out.comparison.rescued));
    std::set_intersection(selected.begin(), selected.end(), attn_selected.begin(),
                          attn_selected.end(), std::back_inserter(out.comparison.shared));
    std::set_difference(attn_selected.begin(), attn_selected.end(), selected.begin(),
                        selected.end(), std::back_inserter(out.comparison.replaced));
    return out;
}

}  // namespace dash

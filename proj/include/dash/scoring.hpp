// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dash/types.hpp"

namespace dash {

struct FusionWeights {
    double w_b = 0.4;
    double w_u = 0.3;
    double w_a = 0.3;
};

/// The three normalized importance signals and their weighted fusion, one
/// entry per audio token.
struct ImportanceScores {
    std::vector<double> s_bnd;
    std::vector<double> s_uniq;
    std::vector<double> s_attn;
    std::vector<double> fused;
};

struct AudioRetention {
    std::vector<std::uint8_t> mask;
    std::size_t kept_count = 0;
};

/// Fused-vs-attention-only selection turnover: indices rescued by fusion,
/// selected by both, and attention-only picks replaced by fusion. The three
/// lists are disjoint and sorted ascending.
struct SelectionComparison {
    std::vector<std::size_t> rescued;
    std::vector<std::size_t> shared;
    std::vector<std::size_t> replaced;
};

/// s_bnd[t] = probs[t] / (max_j probs[j] + eps).
std::vector<double> boundary_signal(const std::vector<double>& probs, double eps = kEpsilon);

/// Keeps the floor(ratio * D) channels with the smallest population variance
/// (at least one), ties broken toward the lower channel index. Row order and
/// relative channel order are preserved.
TokenMatrix select_low_variance_channels(const TokenMatrix& tokens, double ratio);

/// Multi-scale Gaussian distance-to-center uniqueness on L2-normalized rows:
/// g_t = sum_a exp(-|a_hat_t - c|^2 / (2a)), s_uniq[t] = 1 - g_t / (max g + eps).
/// A zero-norm row scores 1 (maximally distinct).
std::vector<double> multiscale_uniqueness(const TokenMatrix& selected,
                                          std::span<const double> bandwidths,
                                          double eps = kEpsilon);

/// Max-normalizes logits to [0, 1]; negative inputs are first shifted by -min,
/// which preserves the ranking.
std::vector<double> attention_signal(const AttentionLogits& logits, double eps = kEpsilon);

/// Indices of the k largest scores, ties broken toward the lower index;
/// returned sorted ascending. k >= n keeps everything.
std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k);

/// floor((1 - rho) * n), evaluated in extended precision.
std::size_t keep_count(double rho, std::size_t n);

struct FusionOutcome {
    ImportanceScores scores;
    AudioRetention retention;
    SelectionComparison comparison;
};

/// Fuses the three signals (or uses the attention signal alone when
/// `attention_only` is set) and retains the top-N_keep tokens,
/// N_keep = max(1, floor((1 - rho_a) * N)).
FusionOutcome fuse_and_select(const std::vector<double>& s_bnd, const std::vector<double>& s_uniq,
                              const std::vector<double>& s_attn, const FusionWeights& weights,
                              double rho_a, bool attention_only);

}  // namespace dash

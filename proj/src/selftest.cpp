// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/selftest.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dash/boundary.hpp"
#include "dash/pipeline.hpp"
#include "dash/projection.hpp"
#include "dash/scoring.hpp"
#include "dash/token_io.hpp"
#include "dash/video_compress.hpp"

namespace dash {

namespace {

using Check = std::function<std::optional<std::string>(std::mt19937_64&)>;

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_draw(rng);
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

TokenMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    TokenMatrix m(n, d);
    for (float& v : m.data) v = static_cast<float>(draw(rng, -1.0, 1.0));
    return m;
}

AttentionLogits random_logits(std::mt19937_64& rng, std::size_t n) {
    AttentionLogits logits;
    logits.values.resize(n);
    for (float& v : logits.values) v = static_cast<float>(draw(rng, -2.0, 6.0));
    return logits;
}

WindowInput random_window(std::mt19937_64& rng) {
    WindowInput input;
    const std::size_t n_a = draw_index(rng, 2, 90);
    const std::size_t d = draw_index(rng, 4, 16);
    input.audio = random_matrix(rng, n_a, d);
    input.attn = random_logits(rng, n_a);
    FrameGrid grid;
    grid.frames = draw_index(rng, 2, 8);
    grid.tokens_per_frame = draw_index(rng, 4, 12);
    grid.tokens = random_matrix(rng, grid.frames * grid.tokens_per_frame, d);
    input.video = std::move(grid);
    return input;
}

std::optional<std::string> check_dump_round_trip(std::mt19937_64& rng) {
    for (int i = 0; i < 60; ++i) {
        const TokenMatrix m = random_matrix(rng, draw_index(rng, 1, 40), draw_index(rng, 1, 16));
        const auto bytes = encode_token_dump(m);
        const auto again = encode_token_dump(decode_token_dump(bytes));
        if (bytes != again) return "round trip changed bytes";
    }
    return std::nullopt;
}

std::optional<std::string> check_generator_determinism(std::mt19937_64& rng) {
    SyntheticSpec spec;
    spec.segment_lengths = {31, 40, 35};
    spec.inter_segment_cosine = 0.1;
    spec.noise_scale = 0.03;
    spec.dim = 12;
    spec.seed = rng();
    const SyntheticStream a = generate_piecewise(spec);
    const SyntheticStream b = generate_piecewise(spec);
    if (a.tokens.data != b.tokens.data) return "same seed produced different tokens";
    if (a.boundaries != b.boundaries) return "same seed produced different boundaries";
    return std::nullopt;
}

std::optional<std::string> check_noiseless_cosine(std::mt19937_64&) {
    SyntheticSpec spec;
    spec.segment_lengths = {30, 30};
    spec.inter_segment_cosine = 0.0;
    spec.noise_scale = 0.0;
    spec.dim = 8;
    const SyntheticStream stream = generate_piecewise(spec);
    const auto sims = adjacent_similarity(stream.tokens, SimilarityMetric::cosine);
    for (std::size_t t = 1; t < sims.size(); ++t) {
        const double expected = t == 30 ? 0.0 : 1.0;
        if (std::abs(sims[t] - expected) > 1e-6) {
            return "noiseless cosine off at position " + std::to_string(t);
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_gap_law(std::mt19937_64& rng) {
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = draw_index(rng, 1, 200);
        std::vector<double> sims(n, 1.0);
        for (std::size_t t = 1; t < n; ++t) sims[t] = draw(rng, -1.0, 1.0);
        const auto probs = boundary_probabilities(sims);
        const double tau = draw(rng, -0.9, 0.9);
        const std::size_t c_min = draw_index(rng, 1, 40);
        const BoundarySet set = detect_boundaries(sims, probs, tau, c_min);
        if (set.positions.front() != 0 || set.positions.back() != n) return "sentinels missing";
        for (std::size_t j = 1; j + 1 < set.positions.size(); ++j) {
            if (set.positions[j] - set.positions[j - 1] < c_min) return "gap law violated";
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_scale_invariance(std::mt19937_64& rng) {
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = draw_index(rng, 2, 60);
        const std::size_t d = draw_index(rng, 2, 16);
        TokenMatrix base = random_matrix(rng, n, d);
        for (float& v : base.data) {
            if (v == 0.0f) v = 0.5f;
        }
        TokenMatrix scaled = base;
        for (std::size_t r = 0; r < n; ++r) {
            // power-of-two scalars keep the float products exact
            const float s = std::ldexp(1.0f, static_cast<int>(draw_index(rng, 0, 6)) - 3);
            for (float& v : scaled.row(r)) v *= s;
        }
        const auto sims_a = adjacent_similarity(base, SimilarityMetric::cosine);
        const auto sims_b = adjacent_similarity(scaled, SimilarityMetric::cosine);
        if (sims_a != sims_b) return "cosine sims changed under per-token scaling";
    }
    return std::nullopt;
}

std::optional<std::string> check_boundary_recovery(std::mt19937_64& rng) {
    for (int i = 0; i < 20; ++i) {
        SyntheticSpec spec;
        const std::size_t segments = draw_index(rng, 2, 4);
        for (std::size_t s = 0; s < segments; ++s) {
            spec.segment_lengths.push_back(draw_index(rng, 30, 70));
        }
        spec.inter_segment_cosine = draw(rng, 0.0, 0.2);
        spec.noise_scale = draw(rng, 0.0, 0.05);
        spec.dim = 16;
        spec.seed = rng();
        const SyntheticStream stream = generate_piecewise(spec);
        const auto sims = adjacent_similarity(stream.tokens, SimilarityMetric::cosine);
        const auto probs = boundary_probabilities(sims);
        const BoundarySet set = detect_boundaries(sims, probs, 0.4, 30);
        std::vector<std::size_t> detected(set.positions.begin() + 1, set.positions.end() - 1);
        std::vector<std::size_t> truth(stream.boundaries.begin() + 1, stream.boundaries.end());
        if (detected.size() != truth.size()) return "boundary count mismatch";
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const std::size_t diff =
                detected[j] > truth[j] ? detected[j] - truth[j] : truth[j] - detected[j];
            if (diff > 1) return "boundary off by more than one position";
        }
        spec.segment_lengths.clear();
    }
    return std::nullopt;
}

std::optional<std::string> check_projection_tiling(std::mt19937_64& rng) {
    for (int i = 0; i < 200; ++i) {
        const std::size_t n_a = draw_index(rng, 1, 300);
        const std::size_t n_v = draw_index(rng, 1, 600);
        BoundarySet audio_set;
        audio_set.positions.push_back(0);
        std::size_t pos = 0;
        while (true) {
            pos += draw_index(rng, 1, 40);
            if (pos >= n_a) break;
            audio_set.positions.push_back(pos);
            audio_set.strengths.push_back(draw(rng, 0.0, 1.0));
        }
        audio_set.positions.push_back(n_a);
        const BoundarySet video_set = project_boundaries(audio_set, n_a, n_v);
        for (std::size_t j = 1; j < video_set.positions.size(); ++j) {
            if (video_set.positions[j] <= video_set.positions[j - 1]) {
                return "projection not strictly increasing";
            }
        }
        const std::size_t k = draw_index(rng, 1, 16);
        const SegmentMap map = refine_boundaries(video_set, n_v, k, n_a);
        std::size_t expect = 0;
        for (std::size_t s = 0; s < map.segment_count(); ++s) {
            if (map.audio_ranges[s].lo != expect) return "audio ranges do not tile";
            expect = map.audio_ranges[s].hi;
        }
        if (expect != n_a) return "audio ranges do not end at n_a";
    }
    return std::nullopt;
}

std::optional<std::string> check_refinement_min_segment(std::mt19937_64& rng) {
    for (int i = 0; i < 200; ++i) {
        const std::size_t n_v = draw_index(rng, 1, 500);
        const std::size_t k = draw_index(rng, 1, 16);
        BoundarySet raw;
        raw.positions.push_back(0);
        std::size_t pos = 0;
        while (true) {
            pos += draw_index(rng, 1, 25);
            if (pos >= n_v) break;
            raw.positions.push_back(pos);
            raw.strengths.push_back(draw(rng, 0.0, 1.0));
        }
        raw.positions.push_back(n_v);
        const SegmentMap map = refine_boundaries(raw, n_v, k, std::max<std::size_t>(1, n_v / 3));
        if (map.segment_count() > 1) {
            for (std::size_t s = 0; s < map.segment_count(); ++s) {
                if (map.segment(s).size() < 2 * k) return "segment below 2K after refinement";
            }
        }
        BoundarySet again;
        again.positions = map.boundaries;
        again.strengths = map.strengths;
        const SegmentMap map2 =
            refine_boundaries(again, n_v, k, std::max<std::size_t>(1, n_v / 3));
        if (map2.boundaries != map.boundaries) return "refinement is not idempotent";
    }
    return std::nullopt;
}

std::optional<std::string> check_popcount_law(std::mt19937_64& rng) {
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = draw_index(rng, 1, 400);
        std::vector<double> s_bnd(n), s_uniq(n), s_attn(n);
        for (std::size_t t = 0; t < n; ++t) {
            s_bnd[t] = draw(rng, 0.0, 1.0);
            s_uniq[t] = draw(rng, 0.0, 1.0);
            s_attn[t] = draw(rng, 0.0, 1.0);
        }
        const double rho = draw(rng, 0.0, 0.95);
        const FusionOutcome out = fuse_and_select(s_bnd, s_uniq, s_attn, {}, rho, false);
        const std::size_t expected = std::max<std::size_t>(1, keep_count(rho, n));
        if (out.retention.kept_count != expected) return "keep count law violated";
        std::size_t bits = 0;
        for (std::uint8_t b : out.retention.mask) bits += b;
        if (bits != expected) return "mask popcount differs from kept_count";
    }
    return std::nullopt;
}

std::optional<std::string> check_degenerate_weights(std::mt19937_64& rng) {
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = draw_index(rng, 1, 200);
        std::vector<double> s_bnd(n), s_uniq(n), s_attn(n);
        for (std::size_t t = 0; t < n; ++t) {
            s_bnd[t] = draw(rng, 0.0, 1.0);
            s_uniq[t] = draw(rng, 0.0, 1.0);
            s_attn[t] = draw(rng, 0.0, 1.0);
        }
        const double rho = draw(rng, 0.0, 0.9);
        const FusionOutcome attn_only =
            fuse_and_select(s_bnd, s_uniq, s_attn, {0.0, 0.0, 1.0}, rho, false);
        const std::size_t k = attn_only.retention.kept_count;
        if (top_k_indices(s_attn, k) != top_k_indices(attn_only.scores.fused, k)) {
            return "weights (0,0,1) differ from attention-only ranking";
        }
        if (!attn_only.comparison.rescued.empty() || !attn_only.comparison.replaced.empty()) {
            return "attention-only weights should produce zero turnover";
        }
        const FusionOutcome bnd_only =
            fuse_and_select(s_bnd, s_uniq, s_attn, {1.0, 0.0, 0.0}, rho, false);
        if (top_k_indices(s_bnd, k) != top_k_indices(bnd_only.scores.fused, k)) {
            return "weights (1,0,0) differ from boundary-only ranking";
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_clamp_and_protection(std::mt19937_64& rng) {
    for (int i = 0; i < 500; ++i) {
        const double rho_v = draw(rng, 0.0, 1.0);
        const double m_bar = draw(rng, 0.0, 1.0);
        const double lambda = draw(rng, 0.0, 0.5);
        const double adapted = adaptive_ratio(rho_v, m_bar, lambda);
        if (adapted < 0.1 || adapted > 0.95) return "adaptive ratio escaped the clamp";
        const double weaker = adaptive_ratio(rho_v, std::min(1.0, m_bar + 0.1), lambda);
        if (weaker > adapted + 1e-12) return "adaptive ratio not nonincreasing in retention";

        const double r_s = draw(rng, 0.0, 1.0);
        const double p_f = draw(rng, 0.0, 1.0);
        const double r_f = boundary_frame_retention(r_s, p_f);
        if (r_f < r_s) return "boundary protection decreased retention";
        if (r_f > 1.0) return "boundary protection exceeded 1";
    }
    return std::nullopt;
}

std::optional<std::string> check_pruner_tie_breaks(std::mt19937_64& rng) {
    const std::size_t k = draw_index(rng, 4, 12);
    const std::size_t d = 6;
    TokenMatrix frame(k, d);
    for (std::size_t r = 0; r < k; ++r) frame.row(r)[0] = 1.0f;
    const std::size_t keep = draw_index(rng, 1, k - 1);
    const auto spatial = spatial_prune_frame(frame, keep);
    const auto temporal = temporal_prune_frame(frame, frame, keep);
    for (std::size_t j = 0; j < keep; ++j) {
        if (spatial[j] != j) return "spatial tie-break is not lowest-index";
        if (temporal[j] != j) return "temporal tie-break is not lowest-index";
    }
    return std::nullopt;
}

std::optional<std::string> check_window_determinism(std::mt19937_64& rng) {
    DashConfig cfg;
    cfg.c_min = 5;
    for (int i = 0; i < 20; ++i) {
        const WindowInput input = random_window(rng);
        const DashResult a = run_window(input.audio, *input.video, input.attn, cfg);
        const DashResult b = run_window(input.audio, *input.video, input.attn, cfg);
        if (a.audio_mask.mask != b.audio_mask.mask) return "audio mask not deterministic";
        if (a.video_mask.mask != b.video_mask.mask) return "video mask not deterministic";
        if (a.scores.fused != b.scores.fused) return "fused scores not deterministic";
    }
    return std::nullopt;
}

std::optional<std::string> check_window_independence(std::mt19937_64& rng) {
    DashConfig cfg;
    cfg.c_min = 5;
    for (int i = 0; i < 10; ++i) {
        std::vector<WindowInput> windows;
        for (int w = 0; w < 3; ++w) windows.push_back(random_window(rng));
        const SequenceResult forward = run_sequence(windows, cfg);
        std::vector<WindowInput> reversed(windows.rbegin(), windows.rend());
        const SequenceResult backward = run_sequence(reversed, cfg);
        for (std::size_t w = 0; w < windows.size(); ++w) {
            const DashResult& a = *forward.windows[w].result;
            const DashResult& b = *backward.windows[windows.size() - 1 - w].result;
            if (a.audio_mask.mask != b.audio_mask.mask) return "audio mask depends on order";
            if (a.video_mask.mask != b.video_mask.mask) return "video mask depends on order";
        }
    }
    return std::nullopt;
}

}  // namespace

int run_selftest(std::ostream& out, std::uint64_t seed) {
    const std::vector<std::pair<std::string, Check>> checks = {
        {"dump-round-trip", check_dump_round_trip},
        {"generator-determinism", check_generator_determinism},
        {"noiseless-cosine-pattern", check_noiseless_cosine},
        {"boundary-gap-law", check_gap_law},
        {"cosine-scale-invariance", check_scale_invariance},
        {"synthetic-boundary-recovery", check_boundary_recovery},
        {"projection-monotone-tiling", check_projection_tiling},
        {"refinement-min-segment", check_refinement_min_segment},
        {"audio-popcount-law", check_popcount_law},
        {"degenerate-weights-equivalence", check_degenerate_weights},
        {"clamp-and-boundary-protection", check_clamp_and_protection},
        {"pruner-tie-breaks", check_pruner_tie_breaks},
        {"window-determinism", check_window_determinism},
        {"window-independence", check_window_independence},
    };

    int failures = 0;
    for (const auto& [name, check] : checks) {
        std::mt19937_64 rng(seed ^ std::hash<std::string>{}(name));
        std::optional<std::string> error;
        try {
            error = check(rng);
        } catch (const std::exception& e) {
            error = std::string("exception: ") + e.what();
        }
        if (error) {
            ++failures;
            out << "FAIL  " << name << ": " << *error << "\n";
        } else {
            out << "PASS  " << name << "\n";
        }
    }
    out << (failures == 0 ? "selftest: all checks passed\n"
                          : "selftest: " + std::to_string(failures) + " check(s) failed\n");
    return failures;
}

}  // namespace dash

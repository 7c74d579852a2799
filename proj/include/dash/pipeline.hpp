// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dash/boundary.hpp"
#include "dash/projection.hpp"
#include "dash/scoring.hpp"
#include "dash/types.hpp"
#include "dash/video_compress.hpp"

namespace dash {

enum class RunMode { window, sequence };

RunMode parse_mode(std::string_view name);
std::string mode_name(RunMode mode);

/// Pipeline configuration. Defaults are the fixed cross-benchmark values;
/// rho_a / rho_v are the caller's target compression ratios.
struct DashConfig {
    double tau_a = 0.4;
    std::size_t c_min = 30;
    FusionWeights weights{};
    std::vector<double> bandwidths{0.125, 0.25, 0.5, 1.0, 2.0};
    double channel_ratio = 0.5;
    double lambda_r = 0.1;
    double clamp_lo = 0.1;
    double clamp_hi = 0.95;
    double protection_factor = 0.3;
    double rho_a = 0.75;
    double rho_v = 0.75;
    double epsilon = kEpsilon;
    SimilarityMetric metric = SimilarityMetric::cosine;
    RunMode mode = RunMode::window;
    std::uint64_t seed = 0;
    std::size_t window_audio = 50;
    std::size_t window_video = 288;

    void validate() const;  // throws std::invalid_argument
    CompressionParams compression_params() const;
};

/// Parses a key-value config document ("key = value" lines, '#' comments)
/// onto `base`. Keys mirror the DashConfig field names; unknown keys are
/// rejected.
DashConfig parse_config_text(std::string_view text, DashConfig base = {});
DashConfig load_config_file(const std::string& path, DashConfig base = {});
std::string config_to_text(const DashConfig& cfg);

struct StageTiming {
    double boundary_ms = 0.0;
    double projection_ms = 0.0;
    double scoring_ms = 0.0;
    double compression_ms = 0.0;

    double total_ms() const { return boundary_ms + projection_ms + scoring_ms + compression_ms; }
};

/// Everything one window run produces. Video-related fields are empty when the
/// run had no video input.
struct DashResult {
    BoundaryProfile profile;
    BoundarySet audio_boundaries;
    SegmentMap segments;
    ImportanceScores scores;
    AudioRetention audio_mask;
    SelectionComparison comparison;
    std::vector<SegmentCompressionPlan> plans;
    VideoRetention video_mask;
    StageTiming timing;
    bool has_video = false;
    bool attention_only = false;
};

DashResult run_window(const TokenMatrix& audio, const FrameGrid& video,
                      const AttentionLogits& attn, const DashConfig& cfg);
DashResult run_window(const TokenMatrix& audio, const AttentionLogits& attn,
                      const DashConfig& cfg);

struct WindowInput {
    TokenMatrix audio;
    std::optional<FrameGrid> video;
    AttentionLogits attn;
};

struct WindowOutcome {
    std::size_t index = 0;
    std::optional<DashResult> result;
    std::string error;

    bool ok() const { return result.has_value(); }
};

struct RetentionStats {
    std::size_t audio_total = 0;
    std::size_t audio_kept = 0;
    std::size_t video_total = 0;
    std::size_t video_kept = 0;
    double audio_retention = 1.0;
    double video_retention = 1.0;
    double overall_retention = 1.0;
    double target_audio_retention = 1.0;
    double target_video_retention = 1.0;
    std::size_t rescued = 0;
    std::size_t shared = 0;
    std::size_t replaced = 0;
    std::size_t segment_count = 0;
    double segment_length_mean = 0.0;
    double segment_length_stddev = 0.0;
    std::size_t window_count = 0;
    std::size_t failed_windows = 0;
    StageTiming timing;
};

struct SequenceResult {
    std::vector<WindowOutcome> windows;
    RetentionStats stats;
};

/// Splits a stream into windows of (window_audio, window_video) tokens per the
/// config, or a single window in sequence mode. The final window may be short.
std::vector<WindowInput> make_windows(const TokenMatrix& audio,
                                      const std::optional<FrameGrid>& video,
                                      const AttentionLogits& attn, const DashConfig& cfg);

/// Runs each window independently; a failing window is reported with its index
/// and does not abort the batch.
SequenceResult run_sequence(const std::vector<WindowInput>& windows, const DashConfig& cfg);

RetentionStats compute_stats(const std::vector<WindowOutcome>& windows, const DashConfig& cfg);

}  // namespace dash

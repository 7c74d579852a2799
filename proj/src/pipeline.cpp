// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dash {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void fail_stage(const char* stage, const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + stage + ": " + e.what());
}

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid number '" + value + "' for key '" + key +
                                    "'");
    }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long parsed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid count '" + value + "' for key '" + key +
                                    "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> values;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        values.push_back(parse_double(key, trim(item)));
    }
    if (values.empty()) {
        throw std::invalid_argument("config: empty list for key '" + key + "'");
    }
    return values;
}

}  // namespace

RunMode parse_mode(std::string_view name) {
    if (name == "window") return RunMode::window;
    if (name == "sequence") return RunMode::sequence;
    throw std::invalid_argument("unknown mode '" + std::string(name) +
                                "' (expected window|sequence)");
}

std::string mode_name(RunMode mode) {
    return mode == RunMode::window ? "window" : "sequence";
}

void DashConfig::validate() const {
    if (!(tau_a > -1.0 && tau_a < 1.0)) {
        throw std::invalid_argument("config: tau_a must lie in (-1, 1)");
    }
    if (c_min < 1) throw std::invalid_argument("config: c_min must be >= 1");
    if (weights.w_b < 0.0 || weights.w_u < 0.0 || weights.w_a < 0.0 ||
        weights.w_b + weights.w_u + weights.w_a <= 0.0) {
        throw std::invalid_argument("config: weights must be nonnegative with a positive sum");
    }
    if (bandwidths.empty()) throw std::invalid_argument("config: bandwidths must be nonempty");
    for (double a : bandwidths) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw std::invalid_argument("config: bandwidths must be positive");
        }
    }
    if (!(channel_ratio >= 0.0 && channel_ratio <= 1.0)) {
        throw std::invalid_argument("config: channel_ratio must lie in [0, 1]");
    }
    if (!std::isfinite(lambda_r) || lambda_r < 0.0) {
        throw std::invalid_argument("config: lambda_r must be a nonnegative real");
    }
    if (!(clamp_lo > 0.0 && clamp_lo <= clamp_hi && clamp_hi < 1.0)) {
        throw std::invalid_argument("config: clamp range must satisfy 0 < lo <= hi < 1");
    }
    if (!(protection_factor >= 0.0 && protection_factor <= 1.0)) {
        throw std::invalid_argument("config: protection_factor must lie in [0, 1]");
    }
    if (!(rho_a >= 0.0 && rho_a < 1.0) || !(rho_v >= 0.0 && rho_v < 1.0)) {
        throw std::invalid_argument("config: compression ratios must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
    if (window_audio < 1 || window_video < 1) {
        throw std::invalid_argument("config: window sizes must be >= 1");
    }
}

CompressionParams DashConfig::compression_params() const {
    return {rho_v, lambda_r, clamp_lo, clamp_hi, protection_factor};
}

DashConfig parse_config_text(std::string_view text, DashConfig base) {
    std::stringstream stream{std::string(text)};
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto equals = content.find('=');
        if (equals == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_number) +
                                        " is not of the form key = value");
        }
        const std::string key = trim(content.substr(0, equals));
        const std::string value = trim(content.substr(equals + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("config: line " + std::to_string(line_number) +
                                        " has an empty key or value");
        }

        if (key == "tau_a") base.tau_a = parse_double(key, value);
        else if (key == "c_min") base.c_min = parse_count(key, value);
        else if (key == "w_b") base.weights.w_b = parse_double(key, value);
        else if (key == "w_u") base.weights.w_u = parse_double(key, value);
        else if (key == "w_a") base.weights.w_a = parse_double(key, value);
        else if (key == "bandwidths") base.bandwidths = parse_double_list(key, value);
        else if (key == "channel_ratio") base.channel_ratio = parse_double(key, value);
        else if (key == "lambda_r") base.lambda_r = parse_double(key, value);
        else if (key == "clamp_lo") base.clamp_lo = parse_double(key, value);
        else if (key == "clamp_hi") base.clamp_hi = parse_double(key, value);
        else if (key == "protection_factor") base.protection_factor = parse_double(key, value);
        else if (key == "rho_a") base.rho_a = parse_double(key, value);
        else if (key == "rho_v") base.rho_v = parse_double(key, value);
        else if (key == "epsilon") base.epsilon = parse_double(key, value);
        else if (key == "metric") base.metric = parse_metric(value);
        else if (key == "mode") base.mode = parse_mode(value);
        else if (key == "seed") base.seed = parse_count(key, value);
        else if (key == "window_audio") base.window_audio = parse_count(key, value);
        else if (key == "window_video") base.window_video = parse_count(key, value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    base.validate();
    return base;
}

DashConfig load_config_file(const std::string& path, DashConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), std::move(base));
}

std::string config_to_text(const DashConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "tau_a = " << cfg.tau_a << "\n";
    out << "c_min = " << cfg.c_min << "\n";
    out << "w_b = " << cfg.weights.w_b << "\n";
    out << "w_u = " << cfg.weights.w_u << "\n";
    out << "w_a = " << cfg.weights.w_a << "\n";
    out << "bandwidths = ";
    for (std::size_t i = 0; i < cfg.bandwidths.size(); ++i) {
        if (i) out << ",";
        out << cfg.bandwidths[i];
    }
    out << "\n";
    out << "channel_ratio = " << cfg.channel_ratio << "\n";
    out << "lambda_r = " << cfg.lambda_r << "\n";
    out << "clamp_lo = " << cfg.clamp_lo << "\n";
    out << "clamp_hi = " << cfg.clamp_hi << "\n";
    out << "protection_factor = " << cfg.protection_factor << "\n";
    out << "rho_a = " << cfg.rho_a << "\n";
    out << "rho_v = " << cfg.rho_v << "\n";
    out << "epsilon = " << cfg.epsilon << "\n";
    out << "metric = " << metric_name(cfg.metric) << "\n";
    out << "mode = " << mode_name(cfg.mode) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "window_audio = " << cfg.window_audio << "\n";
    out << "window_video = " << cfg.window_video << "\n";
    return out.str();
}

namespace {

DashResult run_window_impl(const TokenMatrix& audio, const FrameGrid* video,
                           const AttentionLogits& attn, const DashConfig& cfg) {
    cfg.validate();
    if (!audio.valid_shape()) {
        throw std::invalid_argument("run_window: invalid audio matrix");
    }
    if (attn.values.size() != audio.rows) {
        throw std::invalid_argument("run_window: attention logits length " +
                                    std::to_string(attn.values.size()) +
                                    " does not match audio token count " +
                                    std::to_string(audio.rows));
    }
    if (video != nullptr && !video->valid_shape()) {
        throw std::invalid_argument("run_window: video grid shape is inconsistent");
    }

    DashResult result;
    result.has_video = video != nullptr;

    // Stage 1: boundary detection on the audio stream.
    auto start = Clock::now();
    try {
        result.profile.sims = adjacent_similarity(audio, cfg.metric, cfg.seed, cfg.epsilon);
        result.profile.probs = boundary_probabilities(result.profile.sims);
        result.audio_boundaries =
            detect_boundaries(result.profile.sims, result.profile.probs, cfg.tau_a, cfg.c_min);
    } catch (const std::exception& e) {
        fail_stage("boundary", e);
    }
    result.timing.boundary_ms = ms_since(start);

    // Stage 2: cross-modal projection and refinement.
    start = Clock::now();
    if (video != nullptr) {
        try {
            const BoundarySet raw =
                project_boundaries(result.audio_boundaries, audio.rows, video->tokens.rows);
            result.segments =
                refine_boundaries(raw, video->tokens.rows, video->tokens_per_frame, audio.rows);
        } catch (const std::exception& e) {
            fail_stage("projection", e);
        }
    }
    result.timing.projection_ms = ms_since(start);

    // Stage 3: tri-signal fusion and audio selection.
    start = Clock::now();
    try {
        const std::vector<double> s_bnd = boundary_signal(result.profile.probs, cfg.epsilon);
        const TokenMatrix selected = select_low_variance_channels(audio, cfg.channel_ratio);
        const std::vector<double> s_uniq =
            multiscale_uniqueness(selected, cfg.bandwidths, cfg.epsilon);
        const std::vector<double> s_attn = attention_signal(attn, cfg.epsilon);
        result.attention_only = audio.rows < 2;
        FusionOutcome fusion = fuse_and_select(s_bnd, s_uniq, s_attn, cfg.weights, cfg.rho_a,
                                               result.attention_only);
        result.scores = std::move(fusion.scores);
        result.audio_mask = std::move(fusion.retention);
        result.comparison = std::move(fusion.comparison);
    } catch (const std::exception& e) {
        fail_stage("scoring", e);
    }
    result.timing.scoring_ms = ms_since(start);

    // Stage 4: boundary-aware per-segment video compression.
    start = Clock::now();
    if (video != nullptr) {
        try {
            result.plans =
                build_compression_plans(result.segments, result.audio_mask, video->frames,
                                        video->tokens_per_frame, cfg.compression_params());
            result.video_mask.frames = video->frames;
            result.video_mask.tokens_per_frame = video->tokens_per_frame;
            result.video_mask.mask.assign(video->tokens.rows, 0);
            for (const SegmentCompressionPlan& plan : result.plans) {
                compress_segment(*video, plan, result.video_mask);
            }
        } catch (const std::exception& e) {
            fail_stage("compression", e);
        }
    }
    result.timing.compression_ms = ms_since(start);
    return result;
}

}  // namespace

DashResult run_window(const TokenMatrix& audio, const FrameGrid& video,
                      const AttentionLogits& attn, const DashConfig& cfg) {
    return run_window_impl(audio, &video, attn, cfg);
}

DashResult run_window(const TokenMatrix& audio, const AttentionLogits& attn,
                      const DashConfig& cfg) {
    return run_window_impl(audio, nullptr, attn, cfg);
}

std::vector<WindowInput> make_windows(const TokenMatrix& audio,
                                      const std::optional<FrameGrid>& video,
                                      const AttentionLogits& attn, const DashConfig& cfg) {
    cfg.validate();
    if (!audio.valid_shape()) throw std::invalid_argument("make_windows: invalid audio matrix");
    if (attn.values.size() != audio.rows) {
        throw std::invalid_argument("make_windows: attention logits length does not match audio");
    }
    if (video && !video->valid_shape()) {
        throw std::invalid_argument("make_windows: video grid shape is inconsistent");
    }

    const auto slice_audio = [&](std::size_t lo, std::size_t hi) {
        WindowInput input;
        input.audio = TokenMatrix(hi - lo, audio.cols);
        std::copy_n(audio.data.begin() + lo * audio.cols, (hi - lo) * audio.cols,
                    input.audio.data.begin());
        input.attn.values.assign(attn.values.begin() + lo, attn.values.begin() + hi);
        return input;
    };

    std::vector<WindowInput> windows;
    if (cfg.mode == RunMode::sequence) {
        WindowInput input = slice_audio(0, audio.rows);
        input.video = video;
        windows.push_back(std::move(input));
        return windows;
    }

    const std::size_t wa = cfg.window_audio;
    const std::size_t audio_windows = (audio.rows + wa - 1) / wa;
    std::size_t frames_per_window = 0;
    if (video) {
        const std::size_t k = video->tokens_per_frame;
        if (cfg.window_video % k != 0) {
            throw std::invalid_argument("make_windows: window_video (" +
                                        std::to_string(cfg.window_video) +
                                        ") must be a multiple of tokens_per_frame (" +
                                        std::to_string(k) + ")");
        }
        frames_per_window = cfg.window_video / k;
        const std::size_t video_windows =
            (video->frames + frames_per_window - 1) / frames_per_window;
        if (video_windows != audio_windows) {
            throw std::invalid_argument(
                "make_windows: audio splits into " + std::to_string(audio_windows) +
                " windows but video splits into " + std::to_string(video_windows));
        }
    }

    windows.reserve(audio_windows);
    for (std::size_t w = 0; w < audio_windows; ++w) {
        const std::size_t lo = w * wa;
        const std::size_t hi = std::min(audio.rows, lo + wa);
        WindowInput input = slice_audio(lo, hi);
        if (video) {
            const std::size_t f_lo = w * frames_per_window;
            const std::size_t f_hi = std::min(video->frames, f_lo + frames_per_window);
            const std::size_t k = video->tokens_per_frame;
            FrameGrid grid;
            grid.frames = f_hi - f_lo;
            grid.tokens_per_frame = k;
            grid.tokens = TokenMatrix(grid.frames * k, video->tokens.cols);
            std::copy_n(video->tokens.data.begin() + f_lo * k * video->tokens.cols,
                        grid.tokens.data.size(), grid.tokens.data.begin());
            input.video = std::move(grid);
        }
        windows.push_back(std::move(input));
    }
    return windows;
}

SequenceResult run_sequence(const std::vector<WindowInput>& windows, const DashConfig& cfg) {
    cfg.validate();
    SequenceResult out;
    out.windows.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        WindowOutcome outcome;
        outcome.index = i;
        try {
            const WindowInput& w = windows[i];
            outcome.result = w.video ? run_window(w.audio, *w.video, w.attn, cfg)
                                     : run_window(w.audio, w.attn, cfg);
        } catch (const std::exception& e) {
            outcome.error = "window " + std::to_string(i) + ": " + e.what();
        }
        out.windows.push_back(std::move(outcome));
    }
    out.stats = compute_stats(out.windows, cfg);
    return out;
}

RetentionStats compute_stats(const std::vector<WindowOutcome>& windows, const DashConfig& cfg) {
    RetentionStats stats;
    stats.window_count = windows.size();
    stats.target_audio_retention = 1.0 - cfg.rho_a;
    stats.target_video_retention = 1.0 - cfg.rho_v;

    std::vector<double> segment_lengths;
    for (const WindowOutcome& outcome : windows) {
        if (!outcome.ok()) {
            ++stats.failed_windows;
            continue;
        }
        const DashResult& r = *outcome.result;
        stats.audio_total += r.audio_mask.mask.size();
        stats.audio_kept += r.audio_mask.kept_count;
        stats.rescued += r.comparison.rescued.size();
        stats.shared += r.comparison.shared.size();
        stats.replaced += r.comparison.replaced.size();
        stats.timing.boundary_ms += r.timing.boundary_ms;
        stats.timing.projection_ms += r.timing.projection_ms;
        stats.timing.scoring_ms += r.timing.scoring_ms;
        stats.timing.compression_ms += r.timing.compression_ms;
        if (r.has_video) {
            stats.video_total += r.video_mask.mask.size();
            stats.video_kept += r.video_mask.kept_count;
            for (std::size_t s = 0; s < r.segments.segment_count(); ++s) {
                segment_lengths.push_back(static_cast<double>(r.segments.segment(s).size()));
            }
        } else {
            // Audio-only runs report the audio chunk lengths instead.
            for (std::size_t i = 1; i < r.audio_boundaries.positions.size(); ++i) {
                segment_lengths.push_back(static_cast<double>(
                    r.audio_boundaries.positions[i] - r.audio_boundaries.positions[i - 1]));
            }
        }
    }

    if (stats.audio_total > 0) {
        stats.audio_retention =
            static_cast<double>(stats.audio_kept) / static_cast<double>(stats.audio_total);
    }
    if (stats.video_total > 0) {
        stats.video_retention =
            static_cast<double>(stats.video_kept) / static_cast<double>(stats.video_total);
    }
    const std::size_t total = stats.audio_total + stats.video_total;
    if (total > 0) {
        stats.overall_retention =
            static_cast<double>(stats.audio_kept + stats.video_kept) / static_cast<double>(total);
    }

    stats.segment_count = segment_lengths.size();
    if (!segment_lengths.empty()) {
        double mean = 0.0;
        for (double len : segment_lengths) mean += len;
        mean /= static_cast<double>(segment_lengths.size());
        double variance = 0.0;
        for (double len : segment_lengths) variance += (len - mean) * (len - mean);
        variance /= static_cast<double>(segment_lengths.size());
        stats.segment_length_mean = mean;
        stats.segment_length_stddev = std::sqrt(variance);
    }
    return stats;
}

}  // namespace dash

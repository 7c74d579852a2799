// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/report.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace dash {

namespace {

using json = nlohmann::ordered_json;

json interval_json(IndexInterval interval) {
    return json::array({interval.lo, interval.hi});
}

json config_json(const DashConfig& cfg) {
    json j;
    j["tau_a"] = cfg.tau_a;
    j["c_min"] = cfg.c_min;
    j["w_b"] = cfg.weights.w_b;
    j["w_u"] = cfg.weights.w_u;
    j["w_a"] = cfg.weights.w_a;
    j["bandwidths"] = cfg.bandwidths;
    j["channel_ratio"] = cfg.channel_ratio;
    j["lambda_r"] = cfg.lambda_r;
    j["clamp_lo"] = cfg.clamp_lo;
    j["clamp_hi"] = cfg.clamp_hi;
    j["protection_factor"] = cfg.protection_factor;
    j["rho_a"] = cfg.rho_a;
    j["rho_v"] = cfg.rho_v;
    j["epsilon"] = cfg.epsilon;
    j["metric"] = metric_name(cfg.metric);
    j["mode"] = mode_name(cfg.mode);
    j["seed"] = cfg.seed;
    j["window_audio"] = cfg.window_audio;
    j["window_video"] = cfg.window_video;
    return j;
}

json stats_json(const RetentionStats& stats) {
    json j;
    j["audio_total"] = stats.audio_total;
    j["audio_kept"] = stats.audio_kept;
    j["video_total"] = stats.video_total;
    j["video_kept"] = stats.video_kept;
    j["audio_retention"] = stats.audio_retention;
    j["video_retention"] = stats.video_retention;
    j["overall_retention"] = stats.overall_retention;
    j["target_audio_retention"] = stats.target_audio_retention;
    j["target_video_retention"] = stats.target_video_retention;
    j["rescued"] = stats.rescued;
    j["shared"] = stats.shared;
    j["replaced"] = stats.replaced;
    j["segment_count"] = stats.segment_count;
    j["segment_length_mean"] = stats.segment_length_mean;
    j["segment_length_stddev"] = stats.segment_length_stddev;
    j["window_count"] = stats.window_count;
    j["failed_windows"] = stats.failed_windows;
    j["timing"] = {
        {"boundary_ms", stats.timing.boundary_ms},
        {"projection_ms", stats.timing.projection_ms},
        {"scoring_ms", stats.timing.scoring_ms},
        {"compression_ms", stats.timing.compression_ms},
        {"total_ms", stats.timing.total_ms()},
    };
    return j;
}

json window_json(const WindowOutcome& outcome) {
    json j;
    j["index"] = outcome.index;
    if (!outcome.ok()) {
        j["error"] = outcome.error;
        return j;
    }
    const DashResult& r = *outcome.result;
    const std::size_t n_a = r.profile.probs.size();

    std::vector<int> detected(n_a, 0);
    for (std::size_t pos : r.audio_boundaries.positions) {
        if (pos < n_a) detected[pos] = 1;
    }
    j["boundary_curve"] = {
        {"similarity", r.profile.sims},
        {"probability", r.profile.probs},
        {"detected", detected},
    };
    j["signals"] = {
        {"boundary", r.scores.s_bnd},
        {"uniqueness", r.scores.s_uniq},
        {"attention", r.scores.s_attn},
        {"fused", r.scores.fused},
    };
    j["selection"] = {
        {"rescued", r.comparison.rescued},
        {"shared", r.comparison.shared},
        {"replaced", r.comparison.replaced},
    };
    j["attention_only"] = r.attention_only;

    json segments;
    segments["boundaries"] = r.segments.boundaries;
    segments["strengths"] = r.segments.strengths;
    json ranges = json::array();
    for (const IndexInterval& range : r.segments.audio_ranges) ranges.push_back(interval_json(range));
    segments["audio_ranges"] = ranges;
    json plans = json::array();
    for (const SegmentCompressionPlan& plan : r.plans) {
        json p;
        p["video_range"] = interval_json(plan.segment);
        p["frame_range"] = interval_json(plan.frame_range);
        p["audio_range"] = interval_json(plan.audio_range);
        p["audio_retention"] = plan.audio_retention;
        p["rho_v"] = plan.rho_v;
        p["frame_retention"] = plan.frame_retention;
        json bf = json::array();
        for (const auto& [frame, strength] : plan.boundary_frames) {
            bf.push_back(json::array({frame, strength}));
        }
        p["boundary_frames"] = bf;
        plans.push_back(std::move(p));
    }
    segments["plans"] = plans;
    j["segments"] = segments;

    j["audio_mask"] = std::vector<int>(r.audio_mask.mask.begin(), r.audio_mask.mask.end());
    j["video_mask"] = std::vector<int>(r.video_mask.mask.begin(), r.video_mask.mask.end());
    return j;
}

void check(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error("report schema: " + message);
}

void check_window(const json& w) {
    check(w.contains("index") && w["index"].is_number_unsigned(), "window needs an index");
    if (w.contains("error")) {
        check(w["error"].is_string(), "window error must be a string");
        return;
    }
    for (const char* key : {"boundary_curve", "signals", "selection", "segments"}) {
        check(w.contains(key) && w[key].is_object(), std::string("window needs object ") + key);
    }
    check(w.contains("audio_mask") && w["audio_mask"].is_array(), "window needs audio_mask");
    check(w.contains("video_mask") && w["video_mask"].is_array(), "window needs video_mask");

    const json& curve = w["boundary_curve"];
    const std::size_t n_a = w["audio_mask"].size();
    check(n_a >= 1, "audio_mask must be nonempty");
    for (const char* key : {"similarity", "probability", "detected"}) {
        check(curve.contains(key) && curve[key].is_array() && curve[key].size() == n_a,
              std::string("boundary_curve.") + key + " must have one entry per audio token");
    }
    for (const char* key : {"boundary", "uniqueness", "attention", "fused"}) {
        check(w["signals"].contains(key) && w["signals"][key].size() == n_a,
              std::string("signals.") + key + " must have one entry per audio token");
    }

    // Selection lists are disjoint; together with the dropped-by-both
    // complement they cover [0, N_a).
    const json& selection = w["selection"];
    std::set<std::size_t> seen;
    std::size_t listed = 0;
    for (const char* key : {"rescued", "shared", "replaced"}) {
        check(selection.contains(key) && selection[key].is_array(),
              std::string("selection.") + key + " must be an array");
        for (const auto& item : selection[key]) {
            const std::size_t idx = item.get<std::size_t>();
            check(idx < n_a, "selection index out of range");
            seen.insert(idx);
            ++listed;
        }
    }
    check(seen.size() == listed, "selection lists must be disjoint");
    check(selection["rescued"].size() == selection["replaced"].size(),
          "rescued and replaced must have equal size");

    std::size_t mask_kept = 0;
    for (const auto& bit : w["audio_mask"]) {
        const int v = bit.get<int>();
        check(v == 0 || v == 1, "audio_mask entries must be 0 or 1");
        mask_kept += static_cast<std::size_t>(v);
    }
    check(mask_kept == selection["rescued"].size() + selection["shared"].size(),
          "audio_mask popcount must equal |rescued| + |shared|");

    const json& boundaries = w["segments"]["boundaries"];
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
        check(boundaries[i].get<std::size_t>() > boundaries[i - 1].get<std::size_t>(),
              "segment boundaries must be strictly increasing");
    }
}

}  // namespace

json build_report(const SequenceResult& seq, const DashConfig& cfg) {
    json report;
    report["schema"] = "dash-report/1";
    report["config"] = config_json(cfg);
    report["stats"] = stats_json(seq.stats);
    json windows = json::array();
    for (const WindowOutcome& outcome : seq.windows) windows.push_back(window_json(outcome));
    report["windows"] = windows;
    validate_report(report);
    return report;
}

void validate_report(const json& report) {
    check(report.is_object(), "report must be an object");
    check(report.value("schema", "") == "dash-report/1", "unknown schema");
    check(report.contains("config") && report["config"].is_object(), "missing config");
    for (const char* key : {"tau_a", "c_min", "w_b", "w_u", "w_a", "rho_a", "rho_v", "metric",
                            "mode"}) {
        check(report["config"].contains(key), std::string("config missing key ") + key);
    }
    check(report.contains("stats") && report["stats"].is_object(), "missing stats");
    for (const char* key : {"audio_retention", "video_retention", "rescued", "shared",
                            "replaced", "segment_length_mean", "segment_length_stddev",
                            "window_count", "timing"}) {
        check(report["stats"].contains(key), std::string("stats missing key ") + key);
    }
    check(report.contains("windows") && report["windows"].is_array(), "missing windows");
    for (const auto& w : report["windows"]) check_window(w);
}

void emit_report(const SequenceResult& seq, const DashConfig& cfg, const std::string& path) {
    const json report = build_report(seq, cfg);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("report: cannot open " + path + " for writing");
    out << report.dump(2) << "\n";
    if (!out) throw std::runtime_error("report: write failure on " + path);
}

void emit_report(const DashResult& result, const DashConfig& cfg, const std::string& path) {
    SequenceResult seq;
    WindowOutcome outcome;
    outcome.index = 0;
    outcome.result = result;
    seq.windows.push_back(std::move(outcome));
    seq.stats = compute_stats(seq.windows, cfg);
    emit_report(seq, cfg, path);
}

json load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: cannot open " + path);
    json report;
    try {
        report = json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("report: parse failure on " + path + ": " + e.what());
    }
    validate_report(report);
    return report;
}

}  // namespace dash

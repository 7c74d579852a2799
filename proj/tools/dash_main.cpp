// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dash/pipeline.hpp"
#include "dash/report.hpp"
#include "dash/selftest.hpp"
#include "dash/token_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;  // missing/invalid files, shape mismatches
constexpr int kExitUsage = 2;    // flag or config misuse

struct CliOptions {
    std::string audio_path;
    std::string attn_path;
    std::string video_path;
    std::string config_path;
    std::string out_path;
    std::string masks_dir;
    std::size_t frames = 0;
    std::size_t tokens_per_frame = 0;
    double rho_a = 0.0;
    double rho_v = 0.0;
    double tau = 0.0;
    std::size_t c_min = 0;
    std::string weights;
    std::string metric;
    std::string mode;
    std::uint64_t seed = 0;
    bool selftest = false;
};

int usage_error(const std::string& message) {
    std::cerr << "error: usage: " << message << "\n";
    return kExitUsage;
}

dash::FusionWeights parse_weights(const std::string& text) {
    std::stringstream stream(text);
    std::vector<double> values;
    std::string item;
    while (std::getline(stream, item, ',')) {
        values.push_back(std::stod(item));
    }
    if (values.size() != 3) {
        throw std::invalid_argument("--weights expects wb,wu,wa");
    }
    return {values[0], values[1], values[2]};
}

void write_masks(const dash::SequenceResult& seq, const std::vector<dash::WindowInput>& windows,
                 const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::uint8_t> audio_mask;
    std::vector<std::uint8_t> video_mask;
    for (std::size_t i = 0; i < seq.windows.size(); ++i) {
        const std::size_t n_a = windows[i].audio.rows;
        const std::size_t n_v = windows[i].video ? windows[i].video->tokens.rows : 0;
        if (seq.windows[i].ok()) {
            const dash::DashResult& r = *seq.windows[i].result;
            audio_mask.insert(audio_mask.end(), r.audio_mask.mask.begin(),
                              r.audio_mask.mask.end());
            video_mask.insert(video_mask.end(), r.video_mask.mask.begin(),
                              r.video_mask.mask.end());
        } else {
            // failed windows stay uncompressed
            audio_mask.insert(audio_mask.end(), n_a, 1);
            video_mask.insert(video_mask.end(), n_v, 1);
        }
    }
    dash::write_mask_dump(audio_mask, (std::filesystem::path(dir) / "audio_mask.dsh").string());
    if (!video_mask.empty()) {
        dash::write_mask_dump(video_mask,
                              (std::filesystem::path(dir) / "video_mask.dsh").string());
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"dash: audio-driven semantic chunking and token compression"};
    CliOptions opt;

    app.add_option("--audio", opt.audio_path, "audio token dump (DSH1)");
    app.add_option("--attn", opt.attn_path, "attention logits dump (DSH1, D=1)");
    app.add_option("--video", opt.video_path, "video token dump (DSH1)");
    app.add_option("--frames", opt.frames, "number of video frames F");
    app.add_option("--tokens-per-frame", opt.tokens_per_frame, "tokens per frame K");
    auto* rho_a_opt = app.add_option("--rho-a", opt.rho_a, "target audio compression ratio");
    auto* rho_v_opt = app.add_option("--rho-v", opt.rho_v, "target video compression ratio");
    auto* tau_opt = app.add_option("--tau", opt.tau, "boundary similarity threshold");
    auto* cmin_opt = app.add_option("--cmin", opt.c_min, "minimum chunk size");
    auto* weights_opt = app.add_option("--weights", opt.weights, "fusion weights wb,wu,wa");
    auto* metric_opt =
        app.add_option("--metric", opt.metric, "similarity metric: cosine|dot|change-rate|random");
    auto* mode_opt = app.add_option("--mode", opt.mode, "window|sequence");
    auto* seed_opt = app.add_option("--seed", opt.seed, "seed for the random metric");
    app.add_option("--config", opt.config_path, "key-value config file");
    app.add_option("--out", opt.out_path, "report output path (stdout when omitted)");
    app.add_option("--masks-out", opt.masks_dir, "directory for audio/video mask dumps");
    app.add_flag("--selftest", opt.selftest, "run the embedded synthetic invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return usage_error(e.what());
    }

    if (opt.selftest) {
        const std::uint64_t seed = seed_opt->count() > 0 ? opt.seed : 20260810;
        return dash::run_selftest(std::cout, seed) == 0 ? kExitOk : kExitRuntime;
    }

    if (opt.audio_path.empty()) return usage_error("--audio is required");
    if (opt.attn_path.empty()) return usage_error("--attn is required");
    if (opt.video_path.empty()) {
        if (rho_v_opt->count() > 0) return usage_error("--rho-v requires --video");
        if (opt.frames != 0 || opt.tokens_per_frame != 0) {
            return usage_error("--frames/--tokens-per-frame require --video");
        }
    } else if (opt.frames == 0 || opt.tokens_per_frame == 0) {
        return usage_error("--video requires --frames and --tokens-per-frame");
    }

    dash::DashConfig cfg;
    try {
        if (!opt.config_path.empty()) cfg = dash::load_config_file(opt.config_path, cfg);
        if (rho_a_opt->count() > 0) cfg.rho_a = opt.rho_a;
        if (rho_v_opt->count() > 0) cfg.rho_v = opt.rho_v;
        if (tau_opt->count() > 0) cfg.tau_a = opt.tau;
        if (cmin_opt->count() > 0) cfg.c_min = opt.c_min;
        if (weights_opt->count() > 0) cfg.weights = parse_weights(opt.weights);
        if (metric_opt->count() > 0) cfg.metric = dash::parse_metric(opt.metric);
        if (mode_opt->count() > 0) cfg.mode = dash::parse_mode(opt.mode);
        if (seed_opt->count() > 0) cfg.seed = opt.seed;
        cfg.validate();
    } catch (const std::exception& e) {
        return usage_error(e.what());
    }

    try {
        const dash::TokenMatrix audio = dash::read_token_dump(opt.audio_path);
        const dash::AttentionLogits attn = dash::read_attention_dump(opt.attn_path);
        if (attn.values.size() != audio.rows) {
            throw std::runtime_error("shape mismatch: audio has " + std::to_string(audio.rows) +
                                     " tokens but attention has " +
                                     std::to_string(attn.values.size()));
        }
        std::optional<dash::FrameGrid> video;
        if (!opt.video_path.empty()) {
            dash::FrameGrid grid;
            grid.frames = opt.frames;
            grid.tokens_per_frame = opt.tokens_per_frame;
            grid.tokens = dash::read_token_dump(opt.video_path);
            if (!grid.valid_shape()) {
                throw std::runtime_error(
                    "shape mismatch: video dump has " + std::to_string(grid.tokens.rows) +
                    " tokens, expected frames*tokens_per_frame = " +
                    std::to_string(opt.frames * opt.tokens_per_frame));
            }
            video = std::move(grid);
        }

        const std::vector<dash::WindowInput> windows =
            dash::make_windows(audio, video, attn, cfg);
        const dash::SequenceResult seq = dash::run_sequence(windows, cfg);

        if (opt.out_path.empty()) {
            std::cout << dash::build_report(seq, cfg).dump(2) << "\n";
        } else {
            dash::emit_report(seq, cfg, opt.out_path);
        }
        // masks land next to the report unless --masks-out redirects them
        std::string masks_dir = opt.masks_dir;
        if (masks_dir.empty() && !opt.out_path.empty()) {
            masks_dir = std::filesystem::path(opt.out_path).parent_path().string();
            if (masks_dir.empty()) masks_dir = ".";
        }
        if (!masks_dir.empty()) write_masks(seq, windows, masks_dir);

        if (seq.stats.failed_windows == seq.windows.size()) {
            throw std::runtime_error("all " + std::to_string(seq.windows.size()) +
                                     " windows failed; first: " + seq.windows.front().error);
        }
        for (const dash::WindowOutcome& w : seq.windows) {
            if (!w.ok()) std::cerr << "warning: " << w.error << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    return run_cli(argc, argv);
}

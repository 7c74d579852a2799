// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

// Drives the installed CLI binary end to end. The binary path arrives in the
// DASH_CLI environment variable (set by CTest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "dash/report.hpp"
#include "dash/token_io.hpp"
#include "support.hpp"

using namespace dash;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* path = std::getenv("DASH_CLI");
    REQUIRE_MESSAGE(path != nullptr, "DASH_CLI must point at the dash binary");
    return path;
}

int run_command(const std::string& args, const fs::path& log) {
    const std::string command = cli_path() + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempTree {
    fs::path dir;
    explicit TempTree(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempTree() { fs::remove_all(dir); }
    std::string path(const std::string& leaf) const { return (dir / leaf).string(); }
};

void write_inputs(const TempTree& tree, test::Rng& rng, std::size_t n_a, std::size_t frames,
                  std::size_t k, std::size_t d) {
    write_token_dump(test::random_matrix(rng, n_a, d), tree.path("audio.dsh"));
    write_attention_dump(test::random_logits(rng, n_a), tree.path("attn.dsh"));
    write_token_dump(test::random_matrix(rng, frames * k, d), tree.path("video.dsh"));
}

}  // namespace

TEST_CASE("happy path writes a report and both masks") {
    TempTree tree("dash_cli_happy");
    test::Rng rng(301);
    // two windows: 50 audio tokens each, 8 frames x 36 tokens = 288 video tokens each
    write_inputs(tree, rng, 100, 16, 36, 12);

    const int exit_code =
        run_command("--audio " + tree.path("audio.dsh") + " --attn " + tree.path("attn.dsh") +
                        " --video " + tree.path("video.dsh") +
                        " --frames 16 --tokens-per-frame 36 --rho-a 0.75 --rho-v 0.75 --out " +
                        tree.path("report.json"),
                    tree.dir / "log.txt");
    INFO(slurp(tree.dir / "log.txt"));
    REQUIRE(exit_code == 0);

    const auto report = load_report(tree.path("report.json"));
    CHECK(report["windows"].size() == 2);
    CHECK(report["config"]["rho_a"].get<double>() == 0.75);

    // masks land next to the report by default
    const TokenMatrix audio_mask = read_token_dump(tree.path("audio_mask.dsh"));
    REQUIRE(audio_mask.rows == 100);
    REQUIRE(audio_mask.cols == 1);
    std::size_t kept = 0;
    for (float v : audio_mask.data) {
        CHECK((v == 0.0f || v == 1.0f));
        kept += v == 1.0f ? 1 : 0;
    }
    CHECK(kept == report["stats"]["audio_kept"].get<std::size_t>());
    // 25% of each 50-token window
    CHECK(kept == 24);

    const TokenMatrix video_mask = read_token_dump(tree.path("video_mask.dsh"));
    CHECK(video_mask.rows == 16 * 36);

    // --masks-out redirects them
    REQUIRE(run_command("--audio " + tree.path("audio.dsh") + " --attn " +
                            tree.path("attn.dsh") + " --video " + tree.path("video.dsh") +
                            " --frames 16 --tokens-per-frame 36 --out " +
                            tree.path("report.json") + " --masks-out " + tree.path("masks"),
                        tree.dir / "log.txt") == 0);
    CHECK(fs::exists(tree.path("masks/audio_mask.dsh")));
    CHECK(fs::exists(tree.path("masks/video_mask.dsh")));
}

TEST_CASE("missing --video with --rho-v set is a usage error") {
    TempTree tree("dash_cli_usage");
    test::Rng rng(302);
    write_inputs(tree, rng, 20, 2, 8, 6);
    const int exit_code = run_command("--audio " + tree.path("audio.dsh") + " --attn " +
                                          tree.path("attn.dsh") + " --rho-v 0.5",
                                      tree.dir / "log.txt");
    CHECK(exit_code == 2);
    CHECK(slurp(tree.dir / "log.txt").find("error: usage:") != std::string::npos);
}

TEST_CASE("other flag misuses also exit 2") {
    TempTree tree("dash_cli_usage2");
    test::Rng rng(303);
    write_inputs(tree, rng, 20, 2, 8, 6);
    const std::string base =
        "--audio " + tree.path("audio.dsh") + " --attn " + tree.path("attn.dsh");

    CHECK(run_command("--attn " + tree.path("attn.dsh"), tree.dir / "log.txt") == 2);
    CHECK(run_command(base + " --metric euclid", tree.dir / "log.txt") == 2);
    CHECK(run_command(base + " --weights 1,2", tree.dir / "log.txt") == 2);
    CHECK(run_command(base + " --video " + tree.path("video.dsh"), tree.dir / "log.txt") == 2);
    CHECK(run_command(base + " --unknown-flag", tree.dir / "log.txt") == 2);

    std::ofstream(tree.path("bad.cfg")) << "tau_b = 1\n";
    CHECK(run_command(base + " --config " + tree.path("bad.cfg"), tree.dir / "log.txt") == 2);
}

TEST_CASE("missing and malformed files exit 1 with a single-line error") {
    TempTree tree("dash_cli_io");
    test::Rng rng(304);
    write_inputs(tree, rng, 20, 2, 8, 6);

    int exit_code = run_command("--audio " + tree.path("nope.dsh") + " --attn " +
                                    tree.path("attn.dsh"),
                                tree.dir / "log.txt");
    CHECK(exit_code == 1);
    const std::string log = slurp(tree.dir / "log.txt");
    CHECK(log.rfind("error: ", 0) == 0);
    CHECK(std::count(log.begin(), log.end(), '\n') == 1);

    std::ofstream(tree.path("garbage.dsh")) << "XXXX this is not a token dump at all";
    exit_code = run_command("--audio " + tree.path("garbage.dsh") + " --attn " +
                                tree.path("attn.dsh"),
                            tree.dir / "log.txt");
    CHECK(exit_code == 1);
    CHECK(slurp(tree.dir / "log.txt").find("bad magic") != std::string::npos);

    // shape mismatch: attention length != audio rows
    write_attention_dump(test::random_logits(rng, 7), tree.path("short_attn.dsh"));
    exit_code = run_command("--audio " + tree.path("audio.dsh") + " --attn " +
                                tree.path("short_attn.dsh"),
                            tree.dir / "log.txt");
    CHECK(exit_code == 1);
    CHECK(slurp(tree.dir / "log.txt").find("shape mismatch") != std::string::npos);
}

TEST_CASE("audio-only runs work and reports go to stdout without --out") {
    TempTree tree("dash_cli_audio_only");
    test::Rng rng(305);
    write_inputs(tree, rng, 60, 2, 8, 6);
    const int exit_code = run_command("--audio " + tree.path("audio.dsh") + " --attn " +
                                          tree.path("attn.dsh") + " --mode sequence",
                                      tree.dir / "out.json");
    REQUIRE(exit_code == 0);
    const auto report = nlohmann::ordered_json::parse(slurp(tree.dir / "out.json"));
    validate_report(report);
    CHECK(report["windows"].size() == 1);
    CHECK(report["windows"][0]["video_mask"].empty());
}

TEST_CASE("config file values apply and flags override them") {
    TempTree tree("dash_cli_config");
    test::Rng rng(306);
    write_inputs(tree, rng, 60, 2, 8, 6);
    std::ofstream(tree.path("run.cfg")) << "rho_a = 0.5\ntau_a = 0.2\nmode = sequence\n";

    int exit_code = run_command("--audio " + tree.path("audio.dsh") + " --attn " +
                                    tree.path("attn.dsh") + " --config " + tree.path("run.cfg") +
                                    " --out " + tree.path("a.json"),
                                tree.dir / "log.txt");
    REQUIRE(exit_code == 0);
    auto report = load_report(tree.path("a.json"));
    CHECK(report["config"]["rho_a"].get<double>() == 0.5);
    CHECK(report["config"]["tau_a"].get<double>() == 0.2);
    CHECK(report["config"]["mode"].get<std::string>() == "sequence");

    exit_code = run_command("--audio " + tree.path("audio.dsh") + " --attn " +
                                tree.path("attn.dsh") + " --config " + tree.path("run.cfg") +
                                " --rho-a 0.25 --out " + tree.path("b.json"),
                            tree.dir / "log.txt");
    REQUIRE(exit_code == 0);
    report = load_report(tree.path("b.json"));
    CHECK(report["config"]["rho_a"].get<double>() == 0.25);
}

TEST_CASE("repeated runs emit identical reports modulo timing") {
    TempTree tree("dash_cli_determinism");
    test::Rng rng(307);
    write_inputs(tree, rng, 50, 4, 16, 8);
    const std::string args = "--audio " + tree.path("audio.dsh") + " --attn " +
                             tree.path("attn.dsh") + " --video " + tree.path("video.dsh") +
                             " --frames 4 --tokens-per-frame 16 --mode sequence";
    REQUIRE(run_command(args + " --out " + tree.path("a.json"), tree.dir / "log.txt") == 0);
    REQUIRE(run_command(args + " --out " + tree.path("b.json"), tree.dir / "log.txt") == 0);
    auto a = load_report(tree.path("a.json"));
    auto b = load_report(tree.path("b.json"));
    a["stats"].erase("timing");
    b["stats"].erase("timing");
    CHECK(a == b);
}

TEST_CASE("selftest passes and prints per-invariant lines") {
    TempTree tree("dash_cli_selftest");
    const int exit_code = run_command("--selftest", tree.dir / "log.txt");
    const std::string log = slurp(tree.dir / "log.txt");
    INFO(log);
    CHECK(exit_code == 0);
    CHECK(log.find("PASS  dump-round-trip") != std::string::npos);
    CHECK(log.find("PASS  boundary-gap-law") != std::string::npos);
    CHECK(log.find("FAIL") == std::string::npos);
}

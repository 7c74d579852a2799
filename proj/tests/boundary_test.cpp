// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#include "dash/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "dash/token_io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dash;

namespace {

TokenMatrix two_rows(std::initializer_list<float> a, std::initializer_list<float> b) {
    TokenMatrix m(2, a.size());
    std::copy(a.begin(), a.end(), m.row(0).begin());
    std::copy(b.begin(), b.end(), m.row(1).begin());
    return m;
}

}  // namespace

TEST_CASE("cosine similarity of adjacent tokens") {
    CHECK(adjacent_similarity(two_rows({1, 0}, {1, 0}), SimilarityMetric::cosine)[1] ==
          doctest::Approx(1.0));
    CHECK(adjacent_similarity(two_rows({1, 0}, {0, 1}), SimilarityMetric::cosine)[1] ==
          doctest::Approx(0.0));
    CHECK(adjacent_similarity(two_rows({1, 0}, {-1, 0}), SimilarityMetric::cosine)[1] ==
          doctest::Approx(-1.0));

    SUBCASE("entry 0 is fixed at 1") {
        test::Rng rng(3);
        const auto sims = adjacent_similarity(test::random_matrix(rng, 10, 4),
                                              SimilarityMetric::cosine);
        CHECK(sims[0] == 1.0);
        CHECK(sims.size() == 10);
    }

    SUBCASE("zero-norm token is rejected with its index") {
        TokenMatrix m(3, 2);
        m.row(0)[0] = 1.0f;
        m.row(2)[1] = 1.0f;  // row 1 stays zero
        CHECK_THROWS_WITH_AS(adjacent_similarity(m, SimilarityMetric::cosine),
                             doctest::Contains("token 1"), std::invalid_argument);
    }
}

TEST_CASE("alternative similarity metrics") {
    test::Rng rng(17);
    const TokenMatrix m = test::random_matrix(rng, 40, 8);

    SUBCASE("dot product lands in [-1, 1] after min-max normalization") {
        const auto sims = adjacent_similarity(m, SimilarityMetric::dot_product);
        CHECK(sims[0] == 1.0);
        double lo = 1.0;
        double hi = -1.0;
        for (std::size_t t = 1; t < sims.size(); ++t) {
            CHECK(sims[t] >= -1.0);
            CHECK(sims[t] <= 1.0);
            lo = std::min(lo, sims[t]);
            hi = std::max(hi, sims[t]);
        }
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("change rate of identical tokens is 1") {
        TokenMatrix constant(5, 3);
        for (std::size_t r = 0; r < 5; ++r) constant.row(r)[0] = 2.0f;
        const auto sims = adjacent_similarity(constant, SimilarityMetric::change_rate);
        for (double s : sims) CHECK(s == doctest::Approx(1.0));
    }

    SUBCASE("change rate maps the largest delta near 0") {
        const auto sims = adjacent_similarity(m, SimilarityMetric::change_rate);
        const double min = *std::min_element(sims.begin() + 1, sims.end());
        CHECK(min == doctest::Approx(0.0).epsilon(1e-6));
        for (std::size_t t = 1; t < sims.size(); ++t) CHECK(sims[t] >= 0.0);
    }

    SUBCASE("random metric is seed-deterministic and in range") {
        const auto a = adjacent_similarity(m, SimilarityMetric::random, 42);
        const auto b = adjacent_similarity(m, SimilarityMetric::random, 42);
        const auto c = adjacent_similarity(m, SimilarityMetric::random, 43);
        CHECK(a == b);
        CHECK(a != c);
        for (std::size_t t = 1; t < a.size(); ++t) {
            CHECK(a[t] >= -1.0);
            CHECK(a[t] <= 1.0);
        }
    }
}

TEST_CASE("boundary probabilities") {
    CHECK(boundary_probabilities({1.0, 1.0})[1] == doctest::Approx(0.0));
    CHECK(boundary_probabilities({1.0, -1.0})[1] == doctest::Approx(1.0));
    CHECK(boundary_probabilities({1.0, 0.2})[1] == doctest::Approx(0.4));
    CHECK(boundary_probabilities({0.5})[0] == 1.0);  // first token is always a boundary
    CHECK_THROWS_AS(boundary_probabilities({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(boundary_probabilities({}), std::invalid_argument);
}

TEST_CASE("boundary detection under the minimum chunk constraint") {
    SUBCASE("no dip crosses the threshold") {
        std::vector<double> sims(50, 0.9);
        sims[0] = 1.0;
        const auto probs = boundary_probabilities(sims);
        const BoundarySet set = detect_boundaries(sims, probs, 0.4, 30);
        CHECK(set.positions == std::vector<std::size_t>{0, 50});
        CHECK(set.strengths.empty());
    }

    SUBCASE("one qualifying dip") {
        std::vector<double> sims(100, 0.9);
        sims[0] = 1.0;
        sims[40] = 0.1;
        const auto probs = boundary_probabilities(sims);
        const BoundarySet set = detect_boundaries(sims, probs, 0.4, 30);
        CHECK(set.positions == std::vector<std::size_t>{0, 40, 100});
        REQUIRE(set.strengths.size() == 1);
        CHECK(set.strengths[0] == doctest::Approx((1.0 - 0.1) / 2.0));
    }

    SUBCASE("early dip suppressed by the gap rule") {
        std::vector<double> sims(100, 0.9);
        sims[0] = 1.0;
        sims[10] = 0.1;
        sims[50] = 0.1;
        const auto probs = boundary_probabilities(sims);
        const BoundarySet set = detect_boundaries(sims, probs, 0.4, 30);
        CHECK(set.positions == std::vector<std::size_t>{0, 50, 100});
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(detect_boundaries({1.0}, {1.0}, 1.5, 1), std::invalid_argument);
        CHECK_THROWS_AS(detect_boundaries({1.0}, {1.0}, 0.4, 0), std::invalid_argument);
        CHECK_THROWS_AS(detect_boundaries({1.0, 0.5}, {1.0}, 0.4, 1), std::invalid_argument);
    }
}

TEST_CASE("detection equals the reference scan on random profiles") {
    test::Rng rng(2026);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = test::draw_index(rng, 1, 300);
        const auto sims = test::random_sims(rng, n);
        const auto probs = boundary_probabilities(sims);
        const double tau = test::draw(rng, -0.9, 0.9);
        const std::size_t c_min = test::draw_index(rng, 1, 60);
        const BoundarySet set = detect_boundaries(sims, probs, tau, c_min);
        REQUIRE(set.positions == test::oracle_detect(sims, tau, c_min));
        for (std::size_t j = 1; j + 1 < set.positions.size(); ++j) {
            CHECK(set.strengths[j - 1] == probs[set.positions[j]]);
        }
    }
}

TEST_CASE("gap law holds on random profiles") {
    test::Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = test::draw_index(rng, 1, 250);
        const auto sims = test::random_sims(rng, n);
        const auto probs = boundary_probabilities(sims);
        const std::size_t c_min = test::draw_index(rng, 1, 50);
        const BoundarySet set = detect_boundaries(sims, probs, test::draw(rng, -0.9, 0.9), c_min);
        for (std::size_t j = 1; j + 1 < set.positions.size(); ++j) {
            CHECK(set.positions[j] - set.positions[j - 1] >= c_min);
        }
        CHECK(set.positions.front() == 0);
        CHECK(set.positions.back() == n);
    }
}

TEST_CASE("per-token power-of-two scaling leaves cosine boundaries bit-identical") {
    test::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = test::draw_index(rng, 2, 80);
        const std::size_t d = test::draw_index(rng, 2, 16);
        TokenMatrix base = test::random_matrix(rng, n, d);
        for (float& v : base.data) {
            if (v == 0.0f) v = 0.25f;
        }
        TokenMatrix scaled = base;
        for (std::size_t r = 0; r < n; ++r) {
            const float s = std::ldexp(1.0f, static_cast<int>(test::draw_index(rng, 0, 8)) - 4);
            for (float& v : scaled.row(r)) v *= s;
        }
        const auto sims_base = adjacent_similarity(base, SimilarityMetric::cosine);
        const auto sims_scaled = adjacent_similarity(scaled, SimilarityMetric::cosine);
        REQUIRE(sims_base == sims_scaled);
        const auto probs = boundary_probabilities(sims_base);
        const double tau = test::draw(rng, -0.9, 0.9);
        const std::size_t c_min = test::draw_index(rng, 1, 20);
        CHECK(detect_boundaries(sims_base, probs, tau, c_min).positions ==
              detect_boundaries(sims_scaled, boundary_probabilities(sims_scaled), tau, c_min)
                  .positions);
    }
}

TEST_CASE("arbitrary positive scaling keeps sims within 1e-6") {
    test::Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = test::draw_index(rng, 2, 40);
        TokenMatrix base = test::random_matrix(rng, n, 8);
        for (float& v : base.data) {
            if (v == 0.0f) v = 0.5f;
        }
        TokenMatrix scaled = base;
        for (std::size_t r = 0; r < n; ++r) {
            const float s = static_cast<float>(test::draw(rng, 0.05, 20.0));
            for (float& v : scaled.row(r)) v *= s;
        }
        const auto a = adjacent_similarity(base, SimilarityMetric::cosine);
        const auto b = adjacent_similarity(scaled, SimilarityMetric::cosine);
        for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(a[t] - b[t]) < 1e-6);
    }
}

TEST_CASE("with c_min=1 a higher threshold detects a superset") {
    test::Rng rng(19);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = test::draw_index(rng, 1, 120);
        const auto sims = test::random_sims(rng, n);
        const auto probs = boundary_probabilities(sims);
        const double tau = test::draw(rng, -0.8, 0.7);
        const double tau_higher = test::draw(rng, tau, 0.9);
        const auto low = detect_boundaries(sims, probs, tau, 1).positions;
        const auto high = detect_boundaries(sims, probs, tau_higher, 1).positions;
        CHECK(std::includes(high.begin(), high.end(), low.begin(), low.end()));
    }
}

TEST_CASE("noiseless synthetic streams are recovered exactly") {
    test::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        SyntheticSpec spec;
        const std::size_t segments = test::draw_index(rng, 1, 5);
        for (std::size_t s = 0; s < segments; ++s) {
            spec.segment_lengths.push_back(test::draw_index(rng, 30, 60));
        }
        spec.inter_segment_cosine = test::draw(rng, -0.5, 0.2);
        spec.noise_scale = 0.0;
        spec.dim = 8;
        const SyntheticStream stream = generate_piecewise(spec);
        const auto sims = adjacent_similarity(stream.tokens, SimilarityMetric::cosine);
        const auto probs = boundary_probabilities(sims);
        const BoundarySet set = detect_boundaries(sims, probs, 0.4, 30);
        const std::vector<std::size_t> detected(set.positions.begin() + 1,
                                                set.positions.end() - 1);
        const std::vector<std::size_t> truth(stream.boundaries.begin() + 1,
                                             stream.boundaries.end());
        CHECK(detected == truth);
    }
}

TEST_CASE("metric names round-trip") {
    for (SimilarityMetric metric :
         {SimilarityMetric::cosine, SimilarityMetric::dot_product, SimilarityMetric::change_rate,
          SimilarityMetric::random}) {
        CHECK(parse_metric(metric_name(metric)) == metric);
    }
    CHECK_THROWS_AS(parse_metric("manhattan"), std::invalid_argument);
}

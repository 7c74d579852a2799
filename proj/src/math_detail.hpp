// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace dash::detail {

// Accumulation runs in double, ascending index order.

template <typename A, typename B>
double dot(std::span<const A> a, std::span<const B> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

template <typename A>
double l2_norm(std::span<const A> a) {
    return std::sqrt(dot(a, a));
}

template <typename A, typename B>
double squared_distance(std::span<const A> a, std::span<const B> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum;
}

}  // namespace dash::detail

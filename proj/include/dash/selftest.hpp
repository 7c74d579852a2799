// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>

namespace dash {

/// Runs the embedded synthetic invariant suite, printing one PASS/FAIL line
/// per check. Returns the number of failed checks.
int run_selftest(std::ostream& out, std::uint64_t seed = 20260810);

}  // namespace dash

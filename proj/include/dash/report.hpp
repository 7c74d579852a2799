// Copyright (C) 2026 the DASH contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "dash/pipeline.hpp"

namespace dash {

/// Builds the diagnostic report: config echo, aggregate stats, and one entry
/// per window with the boundary curve, per-signal score rows, selection
/// comparison, segment map, and retention masks. Key order is fixed.
nlohmann::ordered_json build_report(const SequenceResult& seq, const DashConfig& cfg);

/// Schema check; throws std::runtime_error describing the first violation.
void validate_report(const nlohmann::ordered_json& report);

void emit_report(const SequenceResult& seq, const DashConfig& cfg, const std::string& path);
void emit_report(const DashResult& result, const DashConfig& cfg, const std::string& path);

/// Reads a report back and validates it against the schema.
nlohmann::ordered_json load_report(const std::string& path);

}  // namespace dash

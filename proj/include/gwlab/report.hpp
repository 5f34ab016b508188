/*
 *   Copyright 2026 The guesswork-lab Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwlab/experiments.hpp"
#include "gwlab/rates.hpp"

namespace gwlab {

// JSON views. Every numeric group carries a "units" field.
nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const EstimateWithCI& e);
nlohmann::json to_json(const ExperimentResult& r);
nlohmann::json to_json(const SweepResult& r);
nlohmann::json to_json(const ConcentrationReport& r);
nlohmann::json to_json(const MostLikelyReport& r);
nlohmann::json to_json(std::span<const KeysizeRow> rows);
nlohmann::json to_json(std::span<const Table1Cell> cells);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Aligned text tables.
std::string render_text(std::span<const RateReport> rates);
std::string render_text(const ExperimentResult& r);
std::string render_text(const SweepResult& r);
std::string render_text(const ConcentrationReport& r);
std::string render_text(const MostLikelyReport& r);
std::string render_text(std::span<const KeysizeRow> rows);
std::string render_text(std::span<const Table1Cell> cells);

// CSV: sweep points (m, log2_mean, ci) and other tables.
std::string render_csv(const SweepResult& r);
std::string render_csv(std::span<const RateReport> rates);
std::string render_csv(const ExperimentResult& r);
std::string render_csv(const ConcentrationReport& r);
std::string render_csv(const MostLikelyReport& r);
std::string render_csv(std::span<const KeysizeRow> rows);
std::string render_csv(std::span<const Table1Cell> cells);

std::string trial_log_header();
// One CSV line (newline-terminated) per trial.
std::string trial_log_line(const TrialRecord& r, const std::string& strategy);

}  // namespace gwlab

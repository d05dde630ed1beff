// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbp/eval.hpp"
#include "lbp/synth.hpp"
#include "lbp/trainer.hpp"

namespace lbp {

/// One configuration file drives every command. Sections and keys mirror the
/// config structs; absent keys keep their defaults, unknown keys are errors.
struct LabConfig {
  ScenarioConfig scenario;
  TrainConfig train;
  EvalConfig eval;
  AblationSpec ablation;
  GradcheckConfig gradcheck;
};

LabConfig parse_lab_config(const std::string& text);
std::string render_lab_config(const LabConfig& config);

/// Applies "section.key=value" (value parsed as JSON, bare words as strings).
void apply_override(LabConfig& config, const std::string& assignment);

std::string hex64(std::uint64_t v);
std::uint64_t config_hash(const ScenarioConfig& config);
std::uint64_t config_hash(const TrainConfig& config);
std::uint64_t config_hash(const LabConfig& config);
/// Hash of the dataset's generating config and split.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

/// Line-oriented: a header record, then one record per annotation, oracle
/// object and proposal.
std::string render_dataset(const Dataset& dataset);
Dataset parse_dataset(const std::string& text);

std::string render_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);

std::string render_history(const TrainHistory& history);  // one record per step

std::string render_eval_report(const EvalReport& report);
EvalReport parse_eval_report(const std::string& text);
std::string format_eval_report(const EvalReport& report);

std::string render_count_estimate(const DiscoveryResult& discovery);
std::string format_count_estimate(const DiscoveryResult& discovery);

std::string render_rectify_report(const RectifyReport& report);
std::string format_rectify_report(const RectifyReport& report);

std::string render_ablation(const AblationTable& table);
AblationTable parse_ablation(const std::string& text);
std::string format_ablation(const AblationTable& table);

std::string render_gradcheck(const GradcheckTable& table);
std::string format_gradcheck(const GradcheckTable& table);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Writes `artifacts` into `dir` plus manifest.json listing each file with
/// its content hash and the config hash.
struct Artifact {
  std::string name;
  std::string content;
};
void write_report_dir(const std::string& dir, const std::vector<Artifact>& artifacts,
                      const std::string& command, std::uint64_t config_hash);

}  // namespace lbp

/*
 * Copyright 2026 The RMFT Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmft/dedup.hpp"
#include "rmft/metrics.hpp"
#include "rmft/pareto.hpp"

namespace rmft {

enum class Technique { Baseline, Rmft, Dedup };

std::string_view technique_name(Technique t);
std::optional<Technique> parse_technique(std::string_view name);

// Everything that determines a run's outputs. Serialized as sorted
// key=value lines; `jobs` only affects speed and is not serialized.
struct RunConfig {
  std::filesystem::path corpus;   // full corpus, JSONL
  std::filesystem::path domains;  // curated host list; empty = built-in list
  std::filesystem::path prompts;  // generation prompts; empty = synthetic
  std::filesystem::path out_dir = "rmft_out";
  std::uint64_t seed = 0;
  // Unset sizes fall back to the 100:10:1 ratio over the whole corpus.
  std::optional<std::size_t> split_train;
  std::optional<std::size_t> split_val;
  std::optional<std::size_t> split_test;
  std::size_t order = 8;
  double alpha = 0.1;
  std::size_t epochs = 3;
  std::size_t checkpoints_per_epoch = 10;
  std::vector<Technique> techniques = {Technique::Baseline, Technique::Rmft, Technique::Dedup};
  double tau_min = 0.0;
  double tau_max = 100.0;
  double tau_step = 0.5;
  std::size_t max_generation_bytes = 64;
  std::size_t prompt_window = 24;
  std::size_t top_k = 10;
  std::size_t jobs = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string serialize_config(const RunConfig& config);
// Applies key=value lines on top of `base`. '#' starts a comment line.
// Throws UsageError on unknown keys or unparsable values.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
// Applies a single key=value assignment.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

// File locations inside a run directory.
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.txt"; }
  std::filesystem::path split(std::string_view name) const {
    return root / "splits" / (std::string(name) + ".jsonl");
  }
  std::filesystem::path eda(std::string_view file) const { return root / "eda" / file; }
  std::filesystem::path rmft(std::string_view file) const { return root / "rmft" / file; }
  std::filesystem::path dedup(std::string_view file) const { return root / "dedup" / file; }
  std::filesystem::path simulate(std::string_view file) const {
    return root / "simulate" / file;
  }
  std::filesystem::path eval(std::string_view file) const { return root / "eval" / file; }
  std::filesystem::path maxter(std::string_view file) const { return root / "maxter" / file; }
  std::filesystem::path report() const { return root / "report"; }

  // Training corpus of a technique.
  std::filesystem::path training_corpus(Technique t) const;
  std::filesystem::path artifacts(Technique t) const;
  std::filesystem::path series(Technique t) const;
};

// Parses every regular file under raw_dir (sorted by relative path) as one
// message and writes a JSONL corpus. Returns the message count.
std::size_t run_ingest(const std::filesystem::path& raw_dir, const std::filesystem::path& out);

struct EdaResult {
  std::size_t train = 0, val = 0, test = 0;
  std::size_t train_rows = 0;
  std::size_t train_unique = 0;
  std::size_t overlap = 0;  // addresses present in both train and test
};
// Splits the corpus, writes the splits and the frequency/overlap reports.
EdaResult run_eda(const RunConfig& config);

struct MaskResult {
  std::size_t rows = 0;
  std::size_t replaced = 0;
  std::size_t unique_before = 0;
  std::size_t unique_after = 0;
};
// Throws InvariantError if the masked corpus does not keep the occurrence
// count or still repeats an address.
MaskResult run_mask(const RunConfig& config);

// Throws InvariantError if a header address repeats or a body changed.
DedupReport run_dedup(const RunConfig& config);

// Returns the number of generation prompts used.
std::size_t run_simulate(const RunConfig& config);

std::vector<SummaryRow> run_eval(const RunConfig& config);

struct MaxTERResult {
  std::string technique;
  MaxTERCurve curve;
  AURCResult aurc;
  double avg_ppl = 0.0;
};
std::vector<MaxTERResult> run_maxter(const RunConfig& config);

struct ReportResult {
  std::vector<std::string> files;  // paths relative to the run directory
  std::vector<std::string> gaps;   // stages with missing outputs
};
// Copies every emitted table into <out_dir>/report and writes manifest.json.
// The manifest's generated_at field is the only time-dependent output.
ReportResult run_report(const RunConfig& config);

}  // namespace rmft

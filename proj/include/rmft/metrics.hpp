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
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rmft/memproxy.hpp"
#include "rmft/pii_index.hpp"

namespace rmft {

// Unique addresses of the unmodified training corpus.
struct OriginalEmailSet {
  std::set<EmailAddress> emails;
};

// Original addresses found verbatim in a checkpoint's generations.
struct LeakSet {
  std::set<EmailAddress> emails;
};

// Addresses present in the training data consumed up to a checkpoint.
struct SeenSet {
  std::set<EmailAddress> emails;
};

LeakSet extract_leaks(std::span<const std::string> generations, const OriginalEmailSet& og);

// Total extraction rate, in percent. Throws DomainError if og is empty.
double compute_ter(const LeakSet& leak, const OriginalEmailSet& og);

// Cumulative seen sets, one per checkpoint. Throws OrderingError unless the
// checkpoints are in increasing order with nested seen-id sets.
std::vector<SeenSet> compute_seen_sets(std::span<const CheckpointArtifact> checkpoints,
                                       const IndexTable& table);

// Seen extraction rate, in percent. Throws DomainError if seen is empty.
double compute_ser(const LeakSet& leak, const SeenSet& seen);

// Mean per-prompt perplexity difference treatment - baseline. Throws
// DomainError on length mismatch or empty input.
double compute_mdp(std::span<const double> treatment, std::span<const double> baseline);

struct CheckpointMetrics {
  std::size_t checkpoint_index = 0;
  double ter = 0.0;
  double ser = 0.0;
  double mdp = 0.0;
  double avg_ppl = 0.0;
};

// Run-level averages over all checkpoints. Columns follow the usual
// (technique, PPL, TER, SER) summary table; mdp is carried along.
struct SummaryRow {
  std::string technique;
  double ppl = 0.0;
  double ter = 0.0;
  double ser = 0.0;
  double mdp = 0.0;
};

SummaryRow summarize(std::string technique, std::span<const CheckpointMetrics> series);

// Per-checkpoint metrics for one technique. `table` indexes the corpus the
// technique was trained on; its seen sets are restricted to `og`. MDP pairs
// each checkpoint with the baseline checkpoint of the same index; pass the
// technique's own artifacts as `baseline` for the baseline run.
std::vector<CheckpointMetrics> evaluate_series(std::span<const CheckpointArtifact> artifacts,
                                               std::span<const CheckpointArtifact> baseline,
                                               const IndexTable& table,
                                               const OriginalEmailSet& og);

// checkpoint,ter,ser,mdp,avg_ppl
void write_series_csv(std::span<const CheckpointMetrics> series, std::ostream& out);
std::vector<CheckpointMetrics> read_series_csv(const std::filesystem::path& path);
// technique,ppl,ter,ser
void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out);

}  // namespace rmft

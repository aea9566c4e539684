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

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rmft/corpus.hpp"

namespace rmft {

// Byte-level n-gram model with additive smoothing. A context is the
// preceding order-1 bytes. Smoothed probabilities are spread over the full
// 256-byte alphabet:
//
//   P(b | ctx) = (count(ctx, b) + alpha) / (count(ctx) + 256 * alpha)
//
// so every byte of any text has non-zero probability.
class NGramModel {
 public:
  static constexpr std::size_t kAlphabet = 256;

  NGramModel(std::size_t order, double alpha);

  std::size_t order() const { return order_; }
  double alpha() const { return alpha_; }
  std::size_t context_size() const { return order_ - 1; }

  // Adds every (context, next byte) pair of `text` with a full context.
  void observe(std::string_view text);

  std::uint64_t count(std::string_view context, std::uint8_t next) const;
  std::uint64_t context_count(std::string_view context) const;
  double probability(std::string_view context, std::uint8_t next) const;

  // Bytes seen anywhere in training text.
  const std::bitset<kAlphabet>& vocab() const { return vocab_; }
  std::size_t num_contexts() const { return contexts_.size(); }

  // Greedy choice for the next byte: the most frequent successor of the
  // context, lowest byte on ties. A non-empty context shorter than order-1
  // (the start of a short prompt) pools the successors of every full context
  // that ends with it. Unseen contexts fall back to a uniform distribution
  // over the observed vocabulary, i.e. its lowest byte. Returns -1 for an
  // untrained model.
  int argmax_next(std::string_view context) const;

  struct Successors {
    std::uint64_t total = 0;
    // (byte, count), ascending by byte.
    std::vector<std::pair<std::uint8_t, std::uint64_t>> next;

    friend bool operator==(const Successors&, const Successors&) = default;
  };
  const std::unordered_map<std::string, Successors>& contexts() const { return contexts_; }

  friend bool operator==(const NGramModel& a, const NGramModel& b);

  // Versioned JSON dump; contexts are hex-encoded and sorted.
  void save(std::ostream& out) const;
  static NGramModel load(std::istream& in);

 private:
  std::size_t order_;
  double alpha_;
  std::unordered_map<std::string, Successors> contexts_;
  std::bitset<kAlphabet> vocab_;
};

// Appends up to max_bytes greedily chosen bytes to `prompt`; returns only
// the generated continuation.
std::string generate(const NGramModel& model, std::string_view prompt, std::size_t max_bytes);

// exp of the mean negative log-probability of every byte that has a full
// context. Throws DomainError if text is shorter than the model order.
double perplexity(const NGramModel& model, std::string_view text);

struct CheckpointSchedule {
  std::size_t epochs = 3;
  std::size_t checkpoints_per_epoch = 10;
  std::uint64_t seed = 0;

  std::size_t total_checkpoints() const { return epochs * checkpoints_per_epoch; }
  // Number of stream items consumed by checkpoint i (1-based):
  // ceil(i * stream_length / total_checkpoints).
  std::size_t items_through(std::size_t checkpoint, std::size_t stream_length) const;
};

// Datapoint ids in training order: every epoch is an independent seeded
// shuffle of all ids.
std::vector<std::size_t> training_stream(std::size_t corpus_size, const CheckpointSchedule& sched);

struct CheckpointView {
  std::size_t checkpoint_index = 0;  // 1-based
  const NGramModel& model;
  const std::vector<std::size_t>& seen_datapoint_ids;  // ascending
};

// Trains one model over the stream and calls `on_checkpoint` after each
// checkpoint's share of the stream has been consumed.
void run_schedule(const Corpus& corpus, const CheckpointSchedule& sched, std::size_t order,
                  double alpha, const std::function<void(const CheckpointView&)>& on_checkpoint);

// Snapshot of the model at every checkpoint.
std::vector<NGramModel> train_stream(const Corpus& corpus, const CheckpointSchedule& sched,
                                     std::size_t order, double alpha);

struct CheckpointArtifact {
  std::size_t checkpoint_index = 0;
  std::vector<std::size_t> seen_datapoint_ids;  // ascending
  std::vector<std::string> generations;         // one per generation prompt
  std::vector<double> per_prompt_perplexity;    // one per perplexity text

  friend bool operator==(const CheckpointArtifact&, const CheckpointArtifact&) = default;
};

struct SimulationInputs {
  std::span<const std::string> prompts;          // generation prompts
  std::span<const std::string> perplexity_texts;
  std::size_t max_generation_bytes = 64;
  std::size_t jobs = 1;
};

// One artifact per checkpoint of the schedule.
std::vector<CheckpointArtifact> simulate_checkpoints(const Corpus& corpus,
                                                     const CheckpointSchedule& sched,
                                                     std::size_t order, double alpha,
                                                     const SimulationInputs& inputs);

// One JSON object per artifact per line.
void write_artifacts_jsonl(std::span<const CheckpointArtifact> artifacts, std::ostream& out);
std::vector<CheckpointArtifact> read_artifacts_jsonl(const std::filesystem::path& path);

}  // namespace rmft

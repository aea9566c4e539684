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

namespace rmft {

// One email-style message. The header block runs from the start of the
// text up to the first blank line; everything after that blank line is the
// body. header_block() + separator() + body() == full_text() always holds.
// All offsets in the toolkit are byte offsets into full_text().
class Datapoint {
 public:
  Datapoint() = default;

  std::size_t id() const { return id_; }
  // Id of this message in the corpus it was sampled from, if any.
  const std::optional<std::size_t>& source_id() const { return source_id_; }

  const std::string& full_text() const { return text_; }
  std::string_view header_block() const {
    return std::string_view(text_).substr(0, header_end_);
  }
  std::string_view separator() const {
    return std::string_view(text_).substr(header_end_, body_begin_ - header_end_);
  }
  std::string_view body() const {
    return std::string_view(text_).substr(body_begin_);
  }

  Datapoint with_id(std::size_t id, std::optional<std::size_t> source_id) const;

  friend Datapoint parse_message(std::string raw, std::size_t id);
  friend bool operator==(const Datapoint&, const Datapoint&) = default;

 private:
  std::size_t id_ = 0;
  std::optional<std::size_t> source_id_;
  std::string text_;
  std::size_t header_end_ = 0;
  std::size_t body_begin_ = 0;
};

// Splits raw at the first blank line. Text without a blank line has an empty
// header and is all body. A text that starts with a blank line has an empty
// header and a one-byte "\n" separator.
Datapoint parse_message(std::string raw, std::size_t id);

// Ordered datapoints with ids 0..size()-1. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  // Re-indexes `datapoints` in the given order; source ids are kept.
  Corpus(std::string name, std::vector<Datapoint> datapoints);

  static Corpus from_texts(std::string name, std::vector<std::string> texts);

  const std::string& name() const { return name_; }
  std::size_t size() const { return datapoints_.size(); }
  bool empty() const { return datapoints_.empty(); }
  const Datapoint& operator[](std::size_t i) const { return datapoints_[i]; }
  const std::vector<Datapoint>& datapoints() const { return datapoints_; }
  auto begin() const { return datapoints_.begin(); }
  auto end() const { return datapoints_.end(); }

  std::size_t total_bytes() const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.datapoints_ == b.datapoints_;
  }

 private:
  std::string name_;
  std::vector<Datapoint> datapoints_;
};

// Split sizes default to the 100:10:1 train/validation/test ratio at 10k scale.
struct SplitSpec {
  std::size_t train_n = 10000;
  std::size_t val_n = 1000;
  std::size_t test_n = 100;
  std::uint64_t seed = 0;

  // Largest 100:10:1 split that fits into `total` datapoints.
  static SplitSpec from_ratio(std::size_t total, std::uint64_t seed);
};

struct CorpusSplits {
  Corpus train;
  Corpus val;
  Corpus test;
};

// Disjoint seeded random subsets. Members keep their original relative
// order; each split is re-indexed from 0 and records the original id as
// source_id. Throws SizeError when the requested sizes exceed the corpus.
CorpusSplits split_corpus(const Corpus& corpus, const SplitSpec& spec);

// Replaces every CRLF with LF.
std::string normalize_newlines(std::string_view text);

// JSON Lines: one {"id": int, "text": string} object per line, plus an
// optional "source_id". Ids must equal the 0-based line ordinal.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rmft

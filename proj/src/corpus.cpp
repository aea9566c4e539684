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

#include "rmft/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rmft/errors.hpp"
#include "rmft/rng.hpp"

namespace rmft {

using nlohmann::json;

Datapoint parse_message(std::string raw, std::size_t id) {
  Datapoint dp;
  dp.id_ = id;
  if (!raw.empty() && raw.front() == '\n') {
    dp.header_end_ = 0;
    dp.body_begin_ = 1;
  } else if (auto pos = raw.find("\n\n"); pos != std::string::npos) {
    dp.header_end_ = pos;
    dp.body_begin_ = pos + 2;
  } else {
    dp.header_end_ = 0;
    dp.body_begin_ = 0;
  }
  dp.text_ = std::move(raw);
  return dp;
}

Datapoint Datapoint::with_id(std::size_t id,
                             std::optional<std::size_t> source_id) const {
  Datapoint dp = *this;
  dp.id_ = id;
  dp.source_id_ = source_id;
  return dp;
}

Corpus::Corpus(std::string name, std::vector<Datapoint> datapoints)
    : name_(std::move(name)), datapoints_(std::move(datapoints)) {
  for (std::size_t i = 0; i < datapoints_.size(); ++i) {
    datapoints_[i] = datapoints_[i].with_id(i, datapoints_[i].source_id());
  }
}

Corpus Corpus::from_texts(std::string name, std::vector<std::string> texts) {
  std::vector<Datapoint> dps;
  dps.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    dps.push_back(parse_message(std::move(texts[i]), i));
  }
  return Corpus(std::move(name), std::move(dps));
}

std::size_t Corpus::total_bytes() const {
  std::size_t n = 0;
  for (const auto& dp : datapoints_) n += dp.full_text().size();
  return n;
}

SplitSpec SplitSpec::from_ratio(std::size_t total, std::uint64_t seed) {
  SplitSpec s;
  s.train_n = total * 100 / 111;
  s.val_n = total * 10 / 111;
  s.test_n = total - s.train_n - s.val_n;
  s.seed = seed;
  return s;
}

CorpusSplits split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  const std::size_t wanted = spec.train_n + spec.val_n + spec.test_n;
  if (wanted > corpus.size()) {
    throw SizeError("split sizes " + std::to_string(spec.train_n) + "+" +
                    std::to_string(spec.val_n) + "+" +
                    std::to_string(spec.test_n) + " exceed corpus size " +
                    std::to_string(corpus.size()));
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(stream_seed(spec.seed, 0));
  seeded_shuffle(order.begin(), order.end(), rng);

  auto take = [&](std::size_t from, std::size_t n, const char* suffix) {
    std::vector<std::size_t> ids(order.begin() + from, order.begin() + from + n);
    std::sort(ids.begin(), ids.end());
    std::vector<Datapoint> dps;
    dps.reserve(n);
    for (auto id : ids) dps.push_back(corpus[id].with_id(0, id));
    return Corpus(corpus.name() + suffix, std::move(dps));
  };
  CorpusSplits out;
  out.train = take(0, spec.train_n, ".train");
  out.val = take(spec.train_n, spec.val_n, ".val");
  out.test = take(spec.train_n + spec.val_n, spec.test_n, ".test");
  return out;
}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    out.push_back(text[i]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path) {
  const std::string contents = normalize_newlines(read_file(path));
  std::vector<Datapoint> dps;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string::npos) nl = contents.size();
    std::string_view line(contents.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (pos >= contents.size()) break;
      throw FormatError(path.string(), line_no, "blank line");
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string(), line_no, e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("text") ||
        !rec["id"].is_number_unsigned() || !rec["text"].is_string()) {
      throw FormatError(path.string(), line_no,
                        "expected {\"id\": unsigned, \"text\": string}");
    }
    const auto id = rec["id"].get<std::size_t>();
    if (id != dps.size()) {
      throw FormatError(path.string(), line_no,
                        "id " + std::to_string(id) + " out of sequence, expected " +
                            std::to_string(dps.size()));
    }
    std::optional<std::size_t> source;
    if (auto it = rec.find("source_id"); it != rec.end()) {
      if (!it->is_number_unsigned()) {
        throw FormatError(path.string(), line_no, "source_id must be unsigned");
      }
      source = it->get<std::size_t>();
    }
    auto text = normalize_newlines(rec["text"].get<std::string>());
    dps.push_back(parse_message(std::move(text), id).with_id(id, source));
  }
  return Corpus(path.stem().string(), std::move(dps));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& dp : corpus) {
    json rec;
    rec["id"] = dp.id();
    if (dp.source_id()) rec["source_id"] = *dp.source_id();
    rec["text"] = dp.full_text();
    out += rec.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace rmft

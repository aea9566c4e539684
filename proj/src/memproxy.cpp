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

#include "rmft/memproxy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "rmft/errors.hpp"
#include "rmft/parallel.hpp"
#include "rmft/rng.hpp"

namespace rmft {
namespace {

constexpr const char* kModelFormat = "rmft-ngram";
constexpr int kModelVersion = 1;

std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += kDigits[c >> 4];
    out += kDigits[c & 0xf];
  }
  return out;
}

std::string from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DomainError("bad hex digit");
  };
  if (hex.size() % 2 != 0) throw DomainError("odd-length hex string");
  std::string out(hex.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<char>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace

NGramModel::NGramModel(std::size_t order, double alpha) : order_(order), alpha_(alpha) {
  if (order < 2) throw DomainError("n-gram order must be at least 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("smoothing constant must be positive and finite");
  }
}

void NGramModel::observe(std::string_view text) {
  for (unsigned char c : text) vocab_.set(c);
  const std::size_t ctx_len = context_size();
  if (text.size() <= ctx_len) return;
  for (std::size_t i = ctx_len; i < text.size(); ++i) {
    auto& succ = contexts_[std::string(text.substr(i - ctx_len, ctx_len))];
    const auto b = static_cast<std::uint8_t>(text[i]);
    auto it = std::lower_bound(succ.next.begin(), succ.next.end(), b,
                               [](const auto& e, std::uint8_t v) { return e.first < v; });
    if (it != succ.next.end() && it->first == b) {
      ++it->second;
    } else {
      succ.next.insert(it, {b, 1});
    }
    ++succ.total;
  }
}

std::uint64_t NGramModel::count(std::string_view context, std::uint8_t next) const {
  auto it = contexts_.find(std::string(context));
  if (it == contexts_.end()) return 0;
  for (const auto& [b, n] : it->second.next) {
    if (b == next) return n;
  }
  return 0;
}

std::uint64_t NGramModel::context_count(std::string_view context) const {
  auto it = contexts_.find(std::string(context));
  return it == contexts_.end() ? 0 : it->second.total;
}

double NGramModel::probability(std::string_view context, std::uint8_t next) const {
  const auto c = static_cast<double>(count(context, next));
  const auto total = static_cast<double>(context_count(context));
  return (c + alpha_) / (total + alpha_ * static_cast<double>(kAlphabet));
}

int NGramModel::argmax_next(std::string_view context) const {
  auto pick = [](const auto& next) {
    auto best = next.begin();
    for (auto e = next.begin(); e != next.end(); ++e) {
      if (e->second > best->second) best = e;
    }
    return best == next.end() ? -1 : static_cast<int>(best->first);
  };
  int choice = -1;
  if (context.size() == context_size()) {
    if (auto it = contexts_.find(std::string(context)); it != contexts_.end()) {
      choice = pick(it->second.next);
    }
  } else if (!context.empty() && context.size() < context_size()) {
    // Pool the successors of every full context ending in `context`.
    std::map<std::uint8_t, std::uint64_t> pooled;
    for (const auto& [ctx, succ] : contexts_) {
      if (std::string_view(ctx).substr(ctx.size() - context.size()) != context) continue;
      for (const auto& [b, n] : succ.next) pooled[b] += n;
    }
    choice = pick(pooled);
  }
  if (choice >= 0) return choice;
  for (std::size_t b = 0; b < kAlphabet; ++b) {
    if (vocab_.test(b)) return static_cast<int>(b);
  }
  return -1;
}

bool operator==(const NGramModel& a, const NGramModel& b) {
  return a.order_ == b.order_ && a.alpha_ == b.alpha_ && a.vocab_ == b.vocab_ &&
         a.contexts_ == b.contexts_;
}

void NGramModel::save(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["order"] = order_;
  j["alpha"] = alpha_;
  auto vocab = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < kAlphabet; ++b) {
    if (vocab_.test(b)) vocab.push_back(b);
  }
  j["vocab"] = std::move(vocab);
  std::map<std::string, const Successors*> sorted;
  for (const auto& [ctx, succ] : contexts_) sorted.emplace(to_hex(ctx), &succ);
  auto ctxs = nlohmann::ordered_json::array();
  for (const auto& [hex, succ] : sorted) {
    auto entry = nlohmann::ordered_json::array();
    entry.push_back(hex);
    auto next = nlohmann::ordered_json::array();
    for (const auto& [b, n] : succ->next) next.push_back({b, n});
    entry.push_back(std::move(next));
    ctxs.push_back(std::move(entry));
  }
  j["contexts"] = std::move(ctxs);
  out << j.dump() << '\n';
}

NGramModel NGramModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != kModelFormat) throw DomainError("not an n-gram model dump");
    if (j.at("version") != kModelVersion) {
      throw DomainError("unsupported model dump version " + j.at("version").dump());
    }
    NGramModel m(j.at("order").get<std::size_t>(), j.at("alpha").get<double>());
    for (const auto& b : j.at("vocab")) {
      const auto v = b.get<std::size_t>();
      if (v >= kAlphabet) throw DomainError("vocab byte out of range");
      m.vocab_.set(v);
    }
    for (const auto& entry : j.at("contexts")) {
      auto ctx = from_hex(entry.at(0).get<std::string>());
      if (ctx.size() != m.context_size()) throw DomainError("context length mismatch");
      Successors succ;
      for (const auto& pair : entry.at(1)) {
        const auto b = pair.at(0).get<std::size_t>();
        const auto n = pair.at(1).get<std::uint64_t>();
        if (b >= kAlphabet || n == 0) throw DomainError("bad successor entry");
        if (!succ.next.empty() && succ.next.back().first >= b) {
          throw DomainError("successors must be strictly ascending by byte");
        }
        succ.next.emplace_back(static_cast<std::uint8_t>(b), n);
        succ.total += n;
      }
      if (!m.contexts_.emplace(std::move(ctx), std::move(succ)).second) {
        throw DomainError("duplicate context");
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed model dump: ") + e.what());
  }
}

std::string generate(const NGramModel& model, std::string_view prompt, std::size_t max_bytes) {
  std::string buffer(prompt);
  const std::size_t ctx_len = model.context_size();
  for (std::size_t step = 0; step < max_bytes; ++step) {
    const std::size_t from = buffer.size() > ctx_len ? buffer.size() - ctx_len : 0;
    const int next = model.argmax_next(std::string_view(buffer).substr(from));
    if (next < 0) break;
    buffer.push_back(static_cast<char>(next));
  }
  return buffer.substr(prompt.size());
}

double perplexity(const NGramModel& model, std::string_view text) {
  if (text.size() < model.order()) {
    throw DomainError("perplexity needs at least " + std::to_string(model.order()) +
                      " bytes, got " + std::to_string(text.size()));
  }
  const std::size_t ctx_len = model.context_size();
  double nll = 0.0;
  for (std::size_t i = ctx_len; i < text.size(); ++i) {
    nll -= std::log(model.probability(text.substr(i - ctx_len, ctx_len),
                                      static_cast<std::uint8_t>(text[i])));
  }
  return std::exp(nll / static_cast<double>(text.size() - ctx_len));
}

std::size_t CheckpointSchedule::items_through(std::size_t checkpoint,
                                              std::size_t stream_length) const {
  const auto total = total_checkpoints();
  if (total == 0) return stream_length;
  checkpoint = std::min(checkpoint, total);
  return (checkpoint * stream_length + total - 1) / total;
}

std::vector<std::size_t> training_stream(std::size_t corpus_size,
                                         const CheckpointSchedule& sched) {
  std::vector<std::size_t> stream;
  stream.reserve(corpus_size * sched.epochs);
  std::vector<std::size_t> epoch(corpus_size);
  for (std::size_t e = 0; e < sched.epochs; ++e) {
    for (std::size_t i = 0; i < corpus_size; ++i) epoch[i] = i;
    Rng rng(stream_seed(sched.seed, e));
    seeded_shuffle(epoch.begin(), epoch.end(), rng);
    stream.insert(stream.end(), epoch.begin(), epoch.end());
  }
  return stream;
}

void run_schedule(const Corpus& corpus, const CheckpointSchedule& sched, std::size_t order,
                  double alpha, const std::function<void(const CheckpointView&)>& on_checkpoint) {
  if (sched.total_checkpoints() == 0) throw DomainError("schedule has no checkpoints");
  NGramModel model(order, alpha);
  const auto stream = training_stream(corpus.size(), sched);
  std::vector<bool> seen(corpus.size(), false);
  std::vector<std::size_t> seen_ids;
  std::size_t consumed = 0;
  for (std::size_t c = 1; c <= sched.total_checkpoints(); ++c) {
    const auto target = sched.items_through(c, stream.size());
    bool grew = false;
    for (; consumed < target; ++consumed) {
      const auto id = stream[consumed];
      model.observe(corpus[id].full_text());
      if (!seen[id]) {
        seen[id] = true;
        grew = true;
      }
    }
    if (grew) {
      seen_ids.clear();
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i]) seen_ids.push_back(i);
      }
    }
    on_checkpoint(CheckpointView{c, model, seen_ids});
  }
}

std::vector<NGramModel> train_stream(const Corpus& corpus, const CheckpointSchedule& sched,
                                     std::size_t order, double alpha) {
  std::vector<NGramModel> snapshots;
  run_schedule(corpus, sched, order, alpha,
               [&](const CheckpointView& v) { snapshots.push_back(v.model); });
  return snapshots;
}

std::vector<CheckpointArtifact> simulate_checkpoints(const Corpus& corpus,
                                                     const CheckpointSchedule& sched,
                                                     std::size_t order, double alpha,
                                                     const SimulationInputs& inputs) {
  for (const auto& t : inputs.perplexity_texts) {
    if (t.size() < order) {
      throw DomainError("perplexity text shorter than the model order");
    }
  }
  std::vector<CheckpointArtifact> out;
  run_schedule(corpus, sched, order, alpha, [&](const CheckpointView& v) {
    CheckpointArtifact a;
    a.checkpoint_index = v.checkpoint_index;
    a.seen_datapoint_ids = v.seen_datapoint_ids;
    a.generations.resize(inputs.prompts.size());
    parallel_for(inputs.prompts.size(), inputs.jobs, [&](std::size_t i) {
      a.generations[i] = generate(v.model, inputs.prompts[i], inputs.max_generation_bytes);
    });
    a.per_prompt_perplexity.resize(inputs.perplexity_texts.size());
    parallel_for(inputs.perplexity_texts.size(), inputs.jobs, [&](std::size_t i) {
      a.per_prompt_perplexity[i] = perplexity(v.model, inputs.perplexity_texts[i]);
    });
    out.push_back(std::move(a));
  });
  return out;
}

void write_artifacts_jsonl(std::span<const CheckpointArtifact> artifacts, std::ostream& out) {
  for (const auto& a : artifacts) {
    nlohmann::ordered_json j;
    j["checkpoint"] = a.checkpoint_index;
    j["seen_datapoint_ids"] = a.seen_datapoint_ids;
    j["generations"] = a.generations;
    j["per_prompt_perplexity"] = a.per_prompt_perplexity;
    out << j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
  }
}

std::vector<CheckpointArtifact> read_artifacts_jsonl(const std::filesystem::path& path) {
  const auto contents = read_file(path);
  std::vector<CheckpointArtifact> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string::npos) nl = contents.size();
    std::string_view line(contents.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CheckpointArtifact a;
      a.checkpoint_index = j.at("checkpoint").get<std::size_t>();
      a.seen_datapoint_ids = j.at("seen_datapoint_ids").get<std::vector<std::size_t>>();
      a.generations = j.at("generations").get<std::vector<std::string>>();
      a.per_prompt_perplexity = j.at("per_prompt_perplexity").get<std::vector<double>>();
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string(), line_no, e.what());
    }
  }
  return out;
}

}  // namespace rmft

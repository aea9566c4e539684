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

#include "rmft/masker.hpp"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"
#include "rmft/csv.hpp"
#include "rmft/errors.hpp"
#include "rmft/parallel.hpp"

namespace rmft {
namespace {

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

PartStores build_part_stores(const IndexTable& table,
                             std::span<const std::string> extra_hosts) {
  PartStores s;
  for (const auto& row : table) {
    s.first_names.emplace_back(row.email.first());
    s.last_names.emplace_back(row.email.last());
    s.hosts.emplace_back(row.email.host());
  }
  for (const auto& h : extra_hosts) s.hosts.push_back(lowercase(h));
  sort_unique(s.first_names);
  sort_unique(s.last_names);
  sort_unique(s.hosts);
  if (!s.complete()) {
    throw EmptyStoreError("part stores need at least one first name, last name and host");
  }
  return s;
}

std::vector<std::string> load_domain_list(const std::filesystem::path& path) {
  const auto contents = normalize_newlines(read_file(path));
  std::vector<std::string> hosts;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string::npos) nl = contents.size();
    auto line = trim(std::string_view(contents).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    line = lowercase(line);
    if (!EmailAddress::parse("a.b@" + line)) {
      throw FormatError(path.string(), line_no, "not a domain.tld host: '" + line + "'");
    }
    hosts.push_back(std::move(line));
  }
  return hosts;
}

const std::vector<std::string>& default_domain_list() {
  static const std::vector<std::string> hosts = {
      "aol.com",     "att.net",     "comcast.net",    "gmail.com", "google.com",
      "hotmail.com", "icloud.com",  "live.com",       "mail.com",  "msn.com",
      "outlook.com", "protonmail.com", "verizon.net", "yahoo.com", "yahoo.org",
  };
  return hosts;
}

std::string_view anchor_name(Anchor a) {
  switch (a) {
    case Anchor::First: return "first";
    case Anchor::Last: return "last";
    case Anchor::Domain: return "domain";
  }
  return "first";
}

std::optional<Anchor> parse_anchor(std::string_view name) {
  if (name == "first") return Anchor::First;
  if (name == "last") return Anchor::Last;
  if (name == "domain") return Anchor::Domain;
  return std::nullopt;
}

EmailAddress compose_replacement(const EmailAddress& original, Anchor anchor,
                                 std::string_view a, std::string_view b) {
  switch (anchor) {
    case Anchor::First: return EmailAddress::from_parts(original.first(), a, b);
    case Anchor::Last: return EmailAddress::from_parts(a, original.last(), b);
    case Anchor::Domain: return EmailAddress::from_parts(a, b, original.host());
  }
  return original;
}

EmailAddress generate_replacement(const EmailAddress& original, Anchor anchor,
                                  const PartStores& stores, Rng& rng) {
  if (!stores.complete()) throw EmptyStoreError("part stores are empty");
  auto pick = [&rng](const std::vector<std::string>& pool) -> const std::string& {
    return pool[uniform_index(rng, pool.size())];
  };
  switch (anchor) {
    case Anchor::First: {
      const auto& last = pick(stores.last_names);
      return compose_replacement(original, anchor, last, pick(stores.hosts));
    }
    case Anchor::Last: {
      const auto& first = pick(stores.first_names);
      return compose_replacement(original, anchor, first, pick(stores.hosts));
    }
    case Anchor::Domain: {
      const auto& first = pick(stores.first_names);
      return compose_replacement(original, anchor, first, pick(stores.last_names));
    }
  }
  return original;
}

std::size_t MaskPlan::replace_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) {
    return r.decision.kind == MaskDecision::Kind::Replace;
  }));
}

MaskPlan plan_masks(const IndexTable& table, const PartStores& stores, std::uint64_t seed) {
  std::unordered_set<EmailAddress, EmailHash> originals;
  for (const auto& row : table) originals.insert(row.email);

  std::unordered_set<EmailAddress, EmailHash> kept;
  std::unordered_set<EmailAddress, EmailHash> planned;
  MaskPlan plan;
  plan.seed = seed;
  plan.rows.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table.rows()[i];
    PlannedRow out{row.datapoint_id, row.start, row.end, row.email, {}};
    if (kept.insert(row.email).second) {
      plan.rows.push_back(std::move(out));
      continue;
    }
    Rng rng(stream_seed(seed, i));
    bool found = false;
    for (std::size_t attempt = 0; attempt < kMaxReplacementAttempts; ++attempt) {
      const auto anchor = static_cast<Anchor>(uniform_index(rng, 3));
      auto candidate = generate_replacement(row.email, anchor, stores, rng);
      if (originals.count(candidate) || planned.count(candidate)) continue;
      planned.insert(candidate);
      out.decision = {MaskDecision::Kind::Replace, std::move(candidate), anchor};
      found = true;
      break;
    }
    if (!found) {
      throw MaskExhaustedError("no fresh replacement for " + row.email.canonical() +
                               " (row " + std::to_string(i) + ") after " +
                               std::to_string(kMaxReplacementAttempts) + " draws");
    }
    plan.rows.push_back(std::move(out));
  }
  return plan;
}

MaskedCorpus apply_masks(const Corpus& corpus, const MaskPlan& plan, std::size_t jobs) {
  // [begin, end) ranges of plan rows per datapoint.
  std::vector<std::pair<std::size_t, std::size_t>> ranges(corpus.size(), {0, 0});
  for (std::size_t i = 0; i < plan.rows.size();) {
    const auto dp = plan.rows[i].datapoint_id;
    if (dp >= corpus.size()) {
      throw SpanMismatchError("plan row " + std::to_string(i) + " references datapoint " +
                              std::to_string(dp) + " outside the corpus");
    }
    if (ranges[dp].second != 0) {
      throw SpanMismatchError("plan rows are not sorted by datapoint");
    }
    std::size_t j = i;
    while (j < plan.rows.size() && plan.rows[j].datapoint_id == dp) ++j;
    ranges[dp] = {i, j};
    i = j;
  }

  std::vector<Datapoint> out(corpus.size());
  std::vector<std::vector<ProvenanceRecord>> prov(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t d) {
    const auto& dp = corpus[d];
    const auto [lo, hi] = ranges[d];
    if (lo == hi) {
      out[d] = dp;
      return;
    }
    const std::string& text = dp.full_text();
    std::string rebuilt;
    rebuilt.reserve(text.size() + 32 * (hi - lo));
    std::size_t cursor = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& row = plan.rows[i];
      if (row.start < cursor || row.end > text.size() || row.start >= row.end) {
        throw SpanMismatchError("plan row " + std::to_string(i) + " has an invalid span");
      }
      const auto found = EmailAddress::parse(
          std::string_view(text).substr(row.start, row.end - row.start));
      if (!found || *found != row.original) {
        throw SpanMismatchError("datapoint " + std::to_string(d) + " span [" +
                                std::to_string(row.start) + "," + std::to_string(row.end) +
                                ") does not hold " + row.original.canonical());
      }
      if (row.decision.kind == MaskDecision::Kind::Keep) continue;
      const auto& replacement = *row.decision.replacement;
      rebuilt.append(text, cursor, row.start - cursor);
      const auto new_start = rebuilt.size();
      rebuilt += replacement.canonical();
      prov[d].push_back({d, row.start, row.end, new_start, rebuilt.size(), row.original,
                         replacement, row.decision.anchor});
      cursor = row.end;
    }
    rebuilt.append(text, cursor, std::string::npos);
    out[d] = parse_message(std::move(rebuilt), d).with_id(d, dp.source_id());
  });

  MaskedCorpus masked;
  masked.corpus = Corpus(corpus.name(), std::move(out));
  for (auto& v : prov) {
    std::move(v.begin(), v.end(), std::back_inserter(masked.provenance));
  }
  return masked;
}

void write_mask_plan_csv(const MaskPlan& plan, std::ostream& out) {
  write_csv_row(out, {"datapoint_id", "start", "end", "original", "decision", "replacement",
                      "anchor"});
  for (const auto& r : plan.rows) {
    const bool replace = r.decision.kind == MaskDecision::Kind::Replace;
    write_csv_row(out, {std::to_string(r.datapoint_id), std::to_string(r.start),
                        std::to_string(r.end), r.original.canonical(),
                        replace ? "replace" : "keep",
                        replace ? std::string_view(r.decision.replacement->canonical())
                                : std::string_view(),
                        replace ? anchor_name(r.decision.anchor) : std::string_view()});
  }
}

void write_provenance_jsonl(std::span<const ProvenanceRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["datapoint_id"] = r.datapoint_id;
    j["old_span"] = {r.old_start, r.old_end};
    j["new_span"] = {r.new_start, r.new_end};
    j["old_email"] = r.old_email.canonical();
    j["new_email"] = r.new_email.canonical();
    j["anchor"] = std::string(anchor_name(r.anchor));
    out << j.dump() << '\n';
  }
}

}  // namespace rmft

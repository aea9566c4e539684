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

#include "rmft/pii_index.hpp"

#include <algorithm>
#include <unordered_map>

#include "rmft/csv.hpp"
#include "rmft/errors.hpp"
#include "rmft/parallel.hpp"

namespace rmft {
namespace detail {

struct EmailBuilder {
  // `raw` spans local@host; offsets are relative to it.
  static EmailAddress build(std::string_view raw, std::size_t dot, std::size_t at,
                            std::size_t tld_dot) {
    EmailAddress e;
    e.canonical_.resize(raw.size());
    std::transform(raw.begin(), raw.end(), e.canonical_.begin(), [](char c) {
      return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    });
    e.dot_ = static_cast<std::uint32_t>(dot);
    e.at_ = static_cast<std::uint32_t>(at);
    e.tld_dot_ = static_cast<std::uint32_t>(tld_dot);
    return e;
  }
};

}  // namespace detail

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
bool is_word(char c) { return is_alnum(c) || c == '_'; }
bool is_local_char(char c) {
  return is_word(c) || c == '.' || c == '%' || c == '+' || c == '-';
}
bool is_host_char(char c) { return is_alnum(c) || c == '.' || c == '-'; }

// [A-Za-z][A-Za-z-]*
bool is_name_token(std::string_view s) {
  if (s.empty() || !is_alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return is_alpha(c) || c == '-'; });
}

constexpr auto npos = std::string_view::npos;

// Offset of the single dot in a first.last local part, or npos.
std::size_t local_dot(std::string_view local) {
  const auto dot = local.find('.');
  if (dot == npos) return npos;
  if (!is_name_token(local.substr(0, dot)) || !is_name_token(local.substr(dot + 1))) {
    return npos;
  }
  return dot;
}

// Offset of the last dot when `host` is label(.label)*.tld, or npos.
std::size_t host_tld_dot(std::string_view host) {
  const auto dot = host.rfind('.');
  if (dot == npos || dot == 0) return npos;
  const auto tld = host.substr(dot + 1);
  if (tld.size() < 2 || !std::all_of(tld.begin(), tld.end(), is_alpha)) return npos;
  std::size_t label_start = 0;
  for (std::size_t i = 0; i <= dot; ++i) {
    if (i == dot || host[i] == '.') {
      if (i == label_start) return npos;
      label_start = i + 1;
    } else if (!is_alnum(host[i]) && host[i] != '-') {
      return npos;
    }
  }
  return dot;
}

}  // namespace

std::vector<EmailMatch> detect_emails(std::string_view text) {
  std::vector<EmailMatch> out;
  std::size_t last_end = 0;
  std::size_t from = 0;
  while (true) {
    const auto at = text.find('@', from);
    if (at == npos) break;
    from = at + 1;

    std::size_t l = at;
    while (l > 0 && is_local_char(text[l - 1])) --l;
    if (l < last_end || l == at) continue;
    const auto dot = local_dot(text.substr(l, at - l));
    if (dot == npos) continue;

    std::size_t r = at + 1;
    while (r < text.size() && is_host_char(text[r])) ++r;
    // Longest host prefix ending on a label boundary that forms a valid host.
    std::size_t end = r;
    std::size_t tld_dot = npos;
    while (end > at + 1) {
      const bool boundary_ok =
          end == r ? (end == text.size() || !is_word(text[end])) : text[end] == '.';
      if (boundary_ok) {
        tld_dot = host_tld_dot(text.substr(at + 1, end - at - 1));
        if (tld_dot != npos) break;
      }
      const auto prev = text.rfind('.', end - 1);
      if (prev == npos || prev <= at) break;
      end = prev;
    }
    if (tld_dot == npos) continue;

    const auto raw = text.substr(l, end - l);
    const std::size_t rel_at = at - l;
    out.push_back({l, end, detail::EmailBuilder::build(raw, dot, rel_at, rel_at + 1 + tld_dot)});
    last_end = end;
    from = end;
  }
  return out;
}

std::optional<EmailAddress> EmailAddress::parse(std::string_view text) {
  auto matches = detect_emails(text);
  if (matches.size() != 1 || matches[0].start != 0 || matches[0].end != text.size()) {
    return std::nullopt;
  }
  return std::move(matches[0].email);
}

EmailAddress EmailAddress::from_parts(std::string_view first, std::string_view last,
                                      std::string_view domain, std::string_view tld) {
  std::string host(domain);
  host += '.';
  host += tld;
  auto e = from_parts(first, last, host);
  if (e.domain().size() != domain.size()) {
    throw DomainError("invalid tld '" + std::string(tld) + "'");
  }
  return e;
}

EmailAddress EmailAddress::from_parts(std::string_view first, std::string_view last,
                                      std::string_view host) {
  std::string raw(first);
  raw += '.';
  raw += last;
  raw += '@';
  raw += host;
  auto e = parse(raw);
  if (!e || e->first().size() != first.size() || e->last().size() != last.size()) {
    throw DomainError("cannot form an address from '" + raw + "'");
  }
  return std::move(*e);
}

IndexTable::IndexTable(std::vector<OccurrenceRecord> rows) : rows_(std::move(rows)) {
  auto key_less = [](const OccurrenceRecord& a, const OccurrenceRecord& b) {
    return std::tie(a.datapoint_id, a.start) < std::tie(b.datapoint_id, b.start);
  };
  if (!std::is_sorted(rows_.begin(), rows_.end(), key_less)) {
    std::stable_sort(rows_.begin(), rows_.end(), key_less);
  }
}

IndexTable IndexTable::header_rows() const {
  std::vector<OccurrenceRecord> rows;
  std::copy_if(rows_.begin(), rows_.end(), std::back_inserter(rows),
               [](const OccurrenceRecord& r) { return r.in_header; });
  return IndexTable(std::move(rows));
}

IndexTable build_index_table(const Corpus& corpus, std::size_t jobs) {
  std::vector<std::vector<OccurrenceRecord>> per_dp(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    const auto& dp = corpus[i];
    const auto header_len = dp.header_block().size();
    for (auto& m : detect_emails(dp.full_text())) {
      per_dp[i].push_back({dp.id(), m.start, m.end, std::move(m.email), m.start < header_len});
    }
  });
  std::vector<OccurrenceRecord> rows;
  std::size_t total = 0;
  for (const auto& v : per_dp) total += v.size();
  rows.reserve(total);
  for (auto& v : per_dp) std::move(v.begin(), v.end(), std::back_inserter(rows));
  return IndexTable(std::move(rows));
}

std::vector<FrequencyEntry> frequency_report(const IndexTable& table, std::size_t k) {
  std::unordered_map<EmailAddress, std::size_t, EmailHash> counts;
  for (const auto& row : table) ++counts[row.email];
  std::vector<FrequencyEntry> entries;
  entries.reserve(counts.size());
  for (auto& [email, n] : counts) entries.push_back({email, n});
  auto by_rank = [](const FrequencyEntry& a, const FrequencyEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.email < b.email;
  };
  k = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k),
                    entries.end(), by_rank);
  entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(k), entries.end());
  return entries;
}

std::set<EmailAddress> unique_emails(const IndexTable& table) {
  std::set<EmailAddress> out;
  for (const auto& row : table) out.insert(row.email);
  return out;
}

void write_index_csv(const IndexTable& table, std::ostream& out) {
  write_csv_row(out, {"datapoint_id", "start", "end", "email", "in_header"});
  for (const auto& r : table) {
    write_csv_row(out, {std::to_string(r.datapoint_id), std::to_string(r.start),
                        std::to_string(r.end), r.email.canonical(),
                        r.in_header ? "true" : "false"});
  }
}

}  // namespace rmft

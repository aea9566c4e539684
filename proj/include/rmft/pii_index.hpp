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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rmft/corpus.hpp"

namespace rmft {

namespace detail {
struct EmailBuilder;
}

// A structured address of the form first.last@domain.tld, stored in its
// lowercase canonical form. `domain` may contain dots when the host has more
// than two labels ("mail.enron" in first.last@mail.enron.com); the other
// parts never do. Ordering and equality follow the canonical string.
class EmailAddress {
 public:
  // Parses a whole string, case-insensitively. Returns nullopt unless the
  // string is exactly one first.last@domain.tld address.
  static std::optional<EmailAddress> parse(std::string_view text);

  // Throws DomainError when a part is malformed.
  static EmailAddress from_parts(std::string_view first, std::string_view last,
                                 std::string_view domain, std::string_view tld);
  // host is "domain.tld"; split at its last dot.
  static EmailAddress from_parts(std::string_view first, std::string_view last,
                                 std::string_view host);

  const std::string& canonical() const { return canonical_; }
  std::string_view first() const { return view(0, dot_); }
  std::string_view last() const { return view(dot_ + 1, at_); }
  std::string_view host() const { return view(at_ + 1, canonical_.size()); }
  std::string_view domain() const { return view(at_ + 1, tld_dot_); }
  std::string_view tld() const { return view(tld_dot_ + 1, canonical_.size()); }

  friend bool operator==(const EmailAddress& a, const EmailAddress& b) {
    return a.canonical_ == b.canonical_;
  }
  friend std::strong_ordering operator<=>(const EmailAddress& a,
                                          const EmailAddress& b) {
    return a.canonical_.compare(b.canonical_) <=> 0;
  }
  friend std::ostream& operator<<(std::ostream& os, const EmailAddress& e) {
    return os << e.canonical_;
  }

 private:
  friend struct detail::EmailBuilder;
  EmailAddress() = default;
  std::string_view view(std::size_t b, std::size_t e) const {
    return std::string_view(canonical_).substr(b, e - b);
  }

  std::string canonical_;
  std::uint32_t dot_ = 0;      // between first and last
  std::uint32_t at_ = 0;
  std::uint32_t tld_dot_ = 0;  // last dot of the host
};

struct EmailHash {
  std::size_t operator()(const EmailAddress& e) const {
    return std::hash<std::string>{}(e.canonical());
  }
};

struct EmailMatch {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  EmailAddress email;
};

// Non-overlapping left-to-right matches of first.last@domain.tld.
// first/last are [A-Za-z][A-Za-z-]*, host labels are [A-Za-z0-9-]+, the tld is
// [A-Za-z]{2,}. The local part must be the whole token before '@': a run such
// as "x.john.doe@" or "j_doe@" is not an address and yields no match.
std::vector<EmailMatch> detect_emails(std::string_view text);

struct OccurrenceRecord {
  std::size_t datapoint_id = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  EmailAddress email;
  bool in_header = false;
};

// Every structured email occurrence in a corpus, sorted by
// (datapoint_id, start).
class IndexTable {
 public:
  IndexTable() = default;
  // Sorts the given rows.
  explicit IndexTable(std::vector<OccurrenceRecord> rows);

  const std::vector<OccurrenceRecord>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  auto begin() const { return rows_.begin(); }
  auto end() const { return rows_.end(); }

  IndexTable header_rows() const;

 private:
  std::vector<OccurrenceRecord> rows_;
};

IndexTable build_index_table(const Corpus& corpus, std::size_t jobs = 1);

struct FrequencyEntry {
  EmailAddress email;
  std::size_t count = 0;
};

// Top-k addresses by occurrence count; ties go to the smaller canonical.
std::vector<FrequencyEntry> frequency_report(const IndexTable& table, std::size_t k);

std::set<EmailAddress> unique_emails(const IndexTable& table);

// CSV columns: datapoint_id,start,end,email,in_header
void write_index_csv(const IndexTable& table, std::ostream& out);

}  // namespace rmft

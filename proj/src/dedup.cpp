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

#include "rmft/dedup.hpp"

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_set>

#include "json.hpp"
#include "rmft/errors.hpp"

namespace rmft {

std::pair<Corpus, DedupReport> dedup_corpus(const Corpus& corpus, const IndexTable& table) {
  std::unordered_set<std::string_view> seen;  // views into `table`
  seen.reserve(table.size());
  std::vector<bool> strip(corpus.size(), false);
  for (const auto& row : table) {
    if (!row.in_header) continue;
    if (row.datapoint_id >= corpus.size()) {
      throw DomainError("index row references datapoint " + std::to_string(row.datapoint_id) +
                        " outside the corpus");
    }
    if (!seen.insert(row.email.canonical()).second) strip[row.datapoint_id] = true;
  }

  DedupReport report;
  std::vector<const EmailAddress*> eliminated;
  for (const auto& row : table) {
    if (row.in_header && strip[row.datapoint_id]) eliminated.push_back(&row.email);
  }
  auto less = [](const EmailAddress* a, const EmailAddress* b) { return *a < *b; };
  auto same = [](const EmailAddress* a, const EmailAddress* b) { return *a == *b; };
  std::sort(eliminated.begin(), eliminated.end(), less);
  eliminated.erase(std::unique(eliminated.begin(), eliminated.end(), same), eliminated.end());
  for (const auto* e : eliminated) {
    report.emails_eliminated.insert(report.emails_eliminated.end(), *e);
  }

  std::vector<Datapoint> out;
  out.reserve(corpus.size());
  for (const auto& dp : corpus) {
    if (!strip[dp.id()]) {
      out.push_back(dp);
      continue;
    }
    report.removed_headers.push_back(dp.id());
    std::string text = "\n";
    text += dp.body();
    out.push_back(parse_message(std::move(text), dp.id()).with_id(dp.id(), dp.source_id()));
  }
  report.retained = corpus.size() - report.removed_headers.size();
  return {Corpus(corpus.name(), std::move(out)), std::move(report)};
}

void write_dedup_report_json(const DedupReport& report, std::ostream& out) {
  nlohmann::ordered_json j;
  j["removed_headers"] = report.removed_headers;
  j["retained"] = report.retained;
  auto emails = nlohmann::ordered_json::array();
  for (const auto& e : report.emails_eliminated) emails.push_back(e.canonical());
  j["emails_eliminated"] = std::move(emails);
  out << j.dump(2) << '\n';
}

}  // namespace rmft

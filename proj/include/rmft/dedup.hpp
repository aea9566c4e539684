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
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "rmft/corpus.hpp"
#include "rmft/pii_index.hpp"

namespace rmft {

struct DedupReport {
  std::vector<std::size_t> removed_headers;  // datapoint ids, ascending
  std::size_t retained = 0;                  // datapoints whose header survived
  std::set<EmailAddress> emails_eliminated;  // addresses found in removed headers
};

// PII-aware header deduplication. Header occurrences are scanned in
// (datapoint_id, start) order; an occurrence whose address already appeared
// in an earlier header occurrence is a repeat, and a datapoint with a repeat
// in its header loses the whole header block. Its text becomes "\n" + body,
// i.e. an empty header followed by the one-byte separator. Bodies are never
// touched and datapoints keep their ids. `table` must be built from `corpus`.
std::pair<Corpus, DedupReport> dedup_corpus(const Corpus& corpus, const IndexTable& table);

void write_dedup_report_json(const DedupReport& report, std::ostream& out);

}  // namespace rmft

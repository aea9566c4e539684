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
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmft/corpus.hpp"
#include "rmft/pii_index.hpp"
#include "rmft/rng.hpp"

namespace rmft {

// Pools that replacement addresses are assembled from. Hosts (domain.tld)
// are kept whole. Each pool is sorted and duplicate-free, which fixes the
// iteration order that seeded draws index into.
struct PartStores {
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> hosts;

  bool complete() const {
    return !first_names.empty() && !last_names.empty() && !hosts.empty();
  }
};

// Name pools come from the table's addresses; the host pool is the observed
// hosts plus `extra_hosts`. Throws EmptyStoreError if any pool ends up empty.
PartStores build_part_stores(const IndexTable& table,
                             std::span<const std::string> extra_hosts = {});

// One host per line; blank lines and '#' comments are skipped. Entries are
// lowercased and must be valid domain.tld hosts.
std::vector<std::string> load_domain_list(const std::filesystem::path& path);

// The curated list of common mail hosts shipped with the toolkit.
const std::vector<std::string>& default_domain_list();

// The part of an address that survives replacement.
enum class Anchor { First, Last, Domain };

std::string_view anchor_name(Anchor a);
std::optional<Anchor> parse_anchor(std::string_view name);

// Keeps the anchored part of `original` and fills the other two slots with
// `a` and `b` in address order: (last, host) for First, (first, host) for
// Last, (first, last) for Domain.
EmailAddress compose_replacement(const EmailAddress& original, Anchor anchor,
                                 std::string_view a, std::string_view b);

// compose_replacement with both free parts drawn uniformly from `stores`.
EmailAddress generate_replacement(const EmailAddress& original, Anchor anchor,
                                  const PartStores& stores, Rng& rng);

struct MaskDecision {
  enum class Kind { Keep, Replace };
  Kind kind = Kind::Keep;
  std::optional<EmailAddress> replacement;  // set iff kind == Replace
  Anchor anchor = Anchor::First;            // meaningful iff kind == Replace
};

struct PlannedRow {
  std::size_t datapoint_id = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  EmailAddress original;
  MaskDecision decision;
};

// Rows in (datapoint_id, start) order. The first occurrence of every address
// is kept; every later occurrence is replaced by an address that is neither
// an original address nor any other planned replacement.
struct MaskPlan {
  std::vector<PlannedRow> rows;
  std::uint64_t seed = 0;

  std::size_t replace_count() const;
};

inline constexpr std::size_t kMaxReplacementAttempts = 1000;

// Row i draws from its own stream keyed by (seed, i). Throws
// MaskExhaustedError when a row cannot find a fresh address within
// kMaxReplacementAttempts draws.
MaskPlan plan_masks(const IndexTable& table, const PartStores& stores, std::uint64_t seed);

struct ProvenanceRecord {
  std::size_t datapoint_id = 0;
  std::size_t old_start = 0;
  std::size_t old_end = 0;
  std::size_t new_start = 0;
  std::size_t new_end = 0;
  EmailAddress old_email;
  EmailAddress new_email;
  Anchor anchor = Anchor::First;
};

struct MaskedCorpus {
  Corpus corpus;
  std::vector<ProvenanceRecord> provenance;  // one per Replace row, plan order
};

// Substitutes every Replace row at its recorded span. Throws
// SpanMismatchError if a span does not hold the planned original address.
MaskedCorpus apply_masks(const Corpus& corpus, const MaskPlan& plan, std::size_t jobs = 1);

// CSV columns: datapoint_id,start,end,original,decision,replacement,anchor
void write_mask_plan_csv(const MaskPlan& plan, std::ostream& out);
// One JSON object per provenance record.
void write_provenance_jsonl(std::span<const ProvenanceRecord> records, std::ostream& out);

}  // namespace rmft

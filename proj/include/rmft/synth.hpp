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
#include <string>
#include <vector>

#include "rmft/corpus.hpp"
#include "rmft/pii_index.hpp"

namespace rmft {

// Synthetic Enron-style mail with a heavy-tailed address distribution.
// Every message has a From, two or three To addresses and one Cc address in
// its header, plus one or two addresses mentioned in the body, so about six
// structured addresses per message. The top address appears exactly
// `top_address_count` times, always as the sender; every other address is
// drawn from a Zipf(1) distribution over the rest of the population.
struct SyntheticMailParams {
  std::size_t messages = 1000;
  std::size_t people = 300;              // distinct addresses in the population
  std::size_t top_address_count = 900;   // must not exceed `messages`
  double mention_probability = 1.0;      // chance of each of two body mentions
  std::uint64_t population_seed = 1;     // fixes who exists
  std::uint64_t message_seed = 2;        // fixes what they write
};

// Distinct first.last@host addresses; element 0 is the top sender.
std::vector<EmailAddress> synthetic_population(std::size_t people, std::uint64_t seed);

Corpus make_synthetic_mail(const SyntheticMailParams& params);

// Extraction prompts: the `window` bytes that precede each structured
// address occurrence in `corpus` (fewer at the start of a message). Sorted
// and duplicate-free.
std::vector<std::string> make_extraction_prompts(const Corpus& corpus, std::size_t window = 24);

}  // namespace rmft

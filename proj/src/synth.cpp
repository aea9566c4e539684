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

#include "rmft/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string_view>
#include <unordered_set>

#include "rmft/errors.hpp"
#include "rmft/rng.hpp"

namespace rmft {
namespace {

constexpr std::array<std::string_view, 64> kFirstNames = {
    "kay",     "suzanne", "john",    "jane",    "mark",    "sara",    "jeff",    "louise",
    "vince",   "sally",   "greg",    "tana",    "steven",  "carol",   "richard", "susan",
    "james",   "elizabeth", "michael", "kate",  "chris",   "debra",   "daren",   "lynn",
    "gerald",  "mary",    "eric",    "tracy",   "phillip", "kim",     "robert",  "janet",
    "david",   "angela",  "scott",   "rosalee", "kevin",   "shelley", "larry",   "holly",
    "andrew",  "julie",   "brian",   "teresa",  "dan",     "vanessa", "tom",     "monika",
    "paul",    "alice",   "peter",   "diana",   "joe",     "karen",   "matt",    "linda",
    "frank",   "nancy",   "bill",    "joan",    "stan",    "rebecca", "barry",   "ginger",
};

constexpr std::array<std::string_view, 96> kLastNames = {
    "mann",      "adams",    "lay",       "skilling", "kaminski", "shackleton", "whalley",
    "jones",     "taylor",   "dasovich",  "shapiro",  "kean",     "beck",       "germany",
    "farmer",    "hyatt",    "nemec",     "sanders",  "haedicke", "steffes",    "kitchen",
    "lavorato",  "presto",   "allen",     "arnold",   "buy",      "delainey",   "derrick",
    "forney",    "grigsby",  "hodge",     "keavey",   "lenhart",  "love",       "martin",
    "mckay",     "parks",    "quigley",   "rogers",   "scholtes", "smith",      "storey",
    "swerzbin",  "tholt",    "ward",      "williams", "zipper",   "watterberg", "baughman",
    "bass",      "benson",   "blair",     "brawner",  "campbell", "carson",     "cash",
    "corman",    "cuilla",   "davis",     "dean",     "dickson",  "dorland",    "ermis",
    "fischer",   "gang",     "gay",       "geaccone", "giron",    "griffith",   "guzman",
    "hain",      "harris",   "hendrickson", "hernandez", "horton", "lewis",     "lokay",
    "lucci",     "mims",     "motley",    "neal",     "panus",    "pereira",    "perlingiere",
    "pimenov",   "platter",  "reitmeyer", "richey",   "ring",     "rodrique",   "ruscitti",
    "salisbury", "schoolcraft", "scott",  "semperger", "shively",
};

// Observed hosts, enron.com dominant.
constexpr std::array<std::string_view, 8> kHosts = {
    "enron.com", "enron.com", "enron.com", "enron.com",
    "att.net",   "aol.com",   "hotmail.com", "ect.enron.com",
};

constexpr std::array<std::string_view, 16> kSubjects = {
    "Re: Wednesday",        "Gas deal update",     "Contract review",   "Meeting moved",
    "Re: Draft agreement",  "Schedule for Q2",     "FW: Pipeline capacity", "Lunch?",
    "Re: Credit terms",     "Weekly report",       "Re: Trading limits", "Conference call",
    "FW: Org announcement", "Re: Storage numbers", "Invoice question",  "Travel plans",
};

constexpr std::array<std::string_view, 10> kFiller = {
    "How's everything coming up?",
    "Did Warren help you last night?",
    "The meeting moved to Thursday at 10.",
    "See the attached schedule for next week.",
    "Thanks for the update on the gas deal.",
    "We still need sign-off from legal.",
    "The numbers look better than last quarter.",
    "Call me when you get a chance.",
    "I will be out of the office on Friday.",
    "Can we push this to Monday?",
};

constexpr std::array<std::string_view, 6> kMentionTemplates = {
    "Please forward this to {} before Friday.",
    "You can reach {} with any questions.",
    "I spoke with {} about the contract.",
    "Let me know if {} needs the draft.",
    "Copying {} on this thread.",
    "Send the final version to {} tonight.",
};

constexpr std::array<std::string_view, 7> kDays = {"Mon", "Tue", "Wed", "Thu",
                                                   "Fri", "Sat", "Sun"};
constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& pool, Rng& rng) {
  return pool[uniform_index(rng, N)];
}

std::string fill(std::string_view tmpl, std::string_view value) {
  std::string out(tmpl);
  const auto pos = out.find("{}");
  out.replace(pos, 2, value);
  return out;
}

std::string two_digits(std::uint64_t v) {
  return (v < 10 ? "0" : "") + std::to_string(v);
}

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

// Zipf(1) over indices 1..n-1 (index 0, the top sender, is drawn separately).
class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) {
    double acc = 0.0;
    for (std::size_t r = 1; r < n; ++r) {
      acc += 1.0 / static_cast<double>(r);
      cdf_.push_back(acc);
    }
  }
  std::size_t draw(Rng& rng) const {
    const double u = unit_draw(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return 1 + static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                   it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

std::vector<EmailAddress> synthetic_population(std::size_t people, std::uint64_t seed) {
  const std::size_t capacity = kFirstNames.size() * kLastNames.size();
  if (people < 8 || people > capacity / 2) {
    throw DomainError("synthetic population size must be in [8, " +
                      std::to_string(capacity / 2) + "]");
  }
  std::vector<EmailAddress> out;
  std::unordered_set<std::string> used_names;
  out.push_back(EmailAddress::from_parts("kay", "mann", "enron.com"));
  used_names.insert("kay.mann");
  Rng rng(stream_seed(seed, 0));
  while (out.size() < people) {
    const auto first = pick(kFirstNames, rng);
    const auto last = pick(kLastNames, rng);
    const auto host = pick(kHosts, rng);
    std::string name(first);
    name += '.';
    name += last;
    if (!used_names.insert(name).second) continue;
    out.push_back(EmailAddress::from_parts(first, last, host));
  }
  return out;
}

Corpus make_synthetic_mail(const SyntheticMailParams& params) {
  if (params.top_address_count > params.messages) {
    throw DomainError("top address count exceeds the number of messages");
  }
  const auto people = synthetic_population(params.people, params.population_seed);
  const ZipfSampler zipf(people.size());

  Rng order_rng(stream_seed(params.message_seed, 0));
  std::vector<bool> top_sender(params.messages, false);
  {
    std::vector<std::size_t> ids(params.messages);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    seeded_shuffle(ids.begin(), ids.end(), order_rng);
    for (std::size_t i = 0; i < params.top_address_count; ++i) top_sender[ids[i]] = true;
  }

  std::vector<std::string> texts;
  texts.reserve(params.messages);
  for (std::size_t m = 0; m < params.messages; ++m) {
    Rng rng(stream_seed(params.message_seed, m + 1));
    std::set<std::size_t> in_header;
    auto fresh = [&]() {
      while (true) {
        const auto idx = zipf.draw(rng);
        if (in_header.insert(idx).second) return idx;
      }
    };
    const std::size_t from = top_sender[m] ? 0 : fresh();
    in_header.insert(from);
    const std::size_t n_to = 2 + uniform_index(rng, 2);
    std::vector<std::size_t> to;
    for (std::size_t i = 0; i < n_to; ++i) to.push_back(fresh());
    const std::size_t cc = fresh();

    std::string t;
    t += "Message-ID: <" + std::to_string(10000000 + rng() % 90000000) + "." +
         std::to_string(1075840000000ULL + rng() % 10000000ULL) + ".JavaMail.evans@thyme>\n";
    t += "Date: ";
    t += pick(kDays, rng);
    t += ", " + std::to_string(1 + uniform_index(rng, 28)) + " ";
    t += pick(kMonths, rng);
    t += " 2001 " + two_digits(uniform_index(rng, 24)) + ":" + two_digits(uniform_index(rng, 60)) +
         ":00 -0700 (PDT)\n";
    t += "From: " + people[from].canonical() + "\n";
    t += "To: ";
    for (std::size_t i = 0; i < to.size(); ++i) {
      if (i) t += ", ";
      t += people[to[i]].canonical();
    }
    t += "\nCc: " + people[cc].canonical() + "\n";
    t += "Subject: ";
    t += pick(kSubjects, rng);
    t += "\n\n";

    t += pick(kFiller, rng);
    t += "\n";
    for (int i = 0; i < 2; ++i) {
      if (unit_draw(rng) >= params.mention_probability) continue;
      t += fill(pick(kMentionTemplates, rng), people[zipf.draw(rng)].canonical());
      t += "\n";
    }
    t += pick(kFiller, rng);
    t += "\n";
    t += capitalized(people[from].first());
    t += "\n";
    texts.push_back(std::move(t));
  }
  return Corpus::from_texts("synthetic", std::move(texts));
}

std::vector<std::string> make_extraction_prompts(const Corpus& corpus, std::size_t window) {
  std::set<std::string> prompts;
  for (const auto& dp : corpus) {
    const auto& text = dp.full_text();
    for (const auto& m : detect_emails(text)) {
      const auto from = m.start > window ? m.start - window : 0;
      if (m.start > from) prompts.insert(text.substr(from, m.start - from));
    }
  }
  return {prompts.begin(), prompts.end()};
}

}  // namespace rmft

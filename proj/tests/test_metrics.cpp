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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "metrics_oracle.hpp"
#include "rmft/csv.hpp"
#include "rmft/errors.hpp"
#include "rmft/metrics.hpp"
#include "rmft/synth.hpp"
#include "test_util.hpp"

using namespace rmft;
using rmft::testing::MetricCase;

namespace {

EmailAddress addr(const std::string& s) { return EmailAddress::parse(s).value(); }

std::set<EmailAddress> addrs(std::initializer_list<const char*> list) {
  std::set<EmailAddress> out;
  for (const auto* s : list) out.insert(addr(s));
  return out;
}

// og with n synthetic members.
OriginalEmailSet og_of_size(std::size_t n) {
  OriginalEmailSet og;
  for (std::size_t i = 0; i < n; ++i) {
    std::string first;
    for (std::size_t v = i + 1; v; v /= 26) first += char('a' + v % 26);
    og.emails.insert(EmailAddress::from_parts(first, "x", "corp.com"));
  }
  return og;
}

CheckpointArtifact ckpt(std::size_t index, std::vector<std::size_t> seen) {
  CheckpointArtifact a;
  a.checkpoint_index = index;
  a.seen_datapoint_ids = std::move(seen);
  return a;
}

IndexTable table_of(const std::vector<std::string>& texts) {
  return build_index_table(Corpus::from_texts("t", texts));
}

std::vector<CheckpointMetrics> evaluate(const MetricCase& c) {
  OriginalEmailSet og;
  for (const auto& r : table_of(c.original)) og.emails.insert(r.email);
  return evaluate_series(c.technique, c.baseline, table_of(c.trained), og);
}

}  // namespace

TEST_CASE("leak sets") {
  const OriginalEmailSet og{addrs({"kay.mann@enron.com", "bob.mann@yahoo.org"})};
  std::vector<std::string> gens{"From: Kay.Mann@Enron.com\nTo: someone"};
  CHECK(extract_leaks(gens, og).emails == addrs({"kay.mann@enron.com"}));

  gens = {"write to new.person@elsewhere.net", "or to other.one@nowhere.org"};
  CHECK(extract_leaks(gens, og).emails.empty());

  gens = {"bob.mann@yahoo.org", "again bob.mann@yahoo.org"};
  CHECK(extract_leaks(gens, og).emails.size() == 1);

  // Near misses are not leaks.
  gens = {"xkay.mann@enron.com", "kay.mann@enron.co", "kay.mann@enron.comm"};
  CHECK(extract_leaks(gens, og).emails.empty());
  CHECK(extract_leaks({}, og).emails.empty());
}

TEST_CASE("TER") {
  const auto og = og_of_size(24480);
  LeakSet leak;
  CHECK(compute_ter(leak, og) == 0.0);
  auto it = og.emails.begin();
  for (int i = 0; i < 3; ++i) leak.emails.insert(*it++);
  CHECK(compute_ter(leak, og) == doctest::Approx(100.0 * 3 / 24480).epsilon(1e-12));
  CHECK(compute_ter(leak, og) == doctest::Approx(0.012254902).epsilon(1e-8));

  LeakSet all{og.emails};
  CHECK(compute_ter(all, og) == 100.0);
  CHECK_THROWS_AS(compute_ter(leak, OriginalEmailSet{}), DomainError);
}

TEST_CASE("SER") {
  const SeenSet seen{addrs({"a.a@x.com", "b.b@x.com", "c.c@x.com", "d.d@x.com"})};
  CHECK(compute_ser(LeakSet{}, seen) == 0.0);
  CHECK(compute_ser(LeakSet{addrs({"a.a@x.com"})}, seen) == 25.0);
  CHECK(compute_ser(LeakSet{seen.emails}, seen) == 100.0);
  CHECK_THROWS_AS(compute_ser(LeakSet{}, SeenSet{}), DomainError);
}

TEST_CASE("SER is at least TER when seen is a subset of og") {
  std::mt19937_64 rng(7);
  const auto og = og_of_size(50);
  std::vector<EmailAddress> pool(og.emails.begin(), og.emails.end());
  for (int trial = 0; trial < 500; ++trial) {
    SeenSet seen;
    LeakSet leak;
    for (const auto& e : pool) {
      if (rng() % 3 == 0) seen.emails.insert(e);
      if (rng() % 5 == 0) leak.emails.insert(e);
    }
    if (seen.emails.empty()) continue;
    CHECK(compute_ser(leak, seen) >= compute_ter(leak, og));
  }
}

TEST_CASE("rates grow with the leak set") {
  const auto og = og_of_size(40);
  SeenSet seen{og.emails};
  LeakSet leak;
  double ter = compute_ter(leak, og), ser = compute_ser(leak, seen);
  for (const auto& e : og.emails) {
    leak.emails.insert(e);
    const double t = compute_ter(leak, og), s = compute_ser(leak, seen);
    CHECK(t > ter);
    CHECK(s > ser);
    ter = t;
    ser = s;
  }
  CHECK(ter == 100.0);
}

TEST_CASE("MDP") {
  const std::vector<double> a{7, 9}, b{6, 8};
  CHECK(compute_mdp(a, b) == 1.0);
  CHECK(compute_mdp(b, a) == -1.0);
  CHECK(compute_mdp(a, a) == 0.0);
  CHECK_THROWS_AS(compute_mdp(a, std::vector<double>{1}), DomainError);
  CHECK_THROWS_AS(compute_mdp({}, {}), DomainError);
}

TEST_CASE("MDP shifts linearly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> a(n), b(n), shifted(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const double c = u(rng) - 50.0;
    for (std::size_t i = 0; i < n; ++i) shifted[i] = a[i] + c;
    CHECK(compute_mdp(shifted, b) == doctest::Approx(compute_mdp(a, b) + c).epsilon(1e-12));
  }
}

TEST_CASE("seen sets accumulate") {
  const auto table = table_of({"From: a.a@x.com\n\nhi", "From: b.b@x.com\n\nhi", "no mail"});
  std::vector<CheckpointArtifact> cks{ckpt(1, {0}), ckpt(2, {0, 1}), ckpt(3, {0, 1}),
                                      ckpt(4, {0, 1, 2})};
  const auto seen = compute_seen_sets(cks, table);
  REQUIRE(seen.size() == 4);
  CHECK(seen[0].emails == addrs({"a.a@x.com"}));
  CHECK(seen[1].emails == addrs({"a.a@x.com", "b.b@x.com"}));
  CHECK(seen[2].emails == seen[1].emails);
  CHECK(seen[3].emails == seen[1].emails);
  CHECK(compute_seen_sets({}, table).empty());
}

TEST_CASE("seen sets reject bad checkpoint orders") {
  const auto table = table_of({"From: a.a@x.com\n\nhi", "From: b.b@x.com\n\nhi"});
  std::vector<CheckpointArtifact> cks{ckpt(2, {0}), ckpt(1, {0, 1})};
  CHECK_THROWS_AS(compute_seen_sets(cks, table), OrderingError);
  cks = {ckpt(1, {0, 1}), ckpt(2, {1})};
  CHECK_THROWS_AS(compute_seen_sets(cks, table), OrderingError);
  cks = {ckpt(1, {1, 0})};
  CHECK_THROWS_AS(compute_seen_sets(cks, table), OrderingError);
  cks = {ckpt(1, {0}), ckpt(1, {0})};
  CHECK_THROWS_AS(compute_seen_sets(cks, table), OrderingError);
}

TEST_CASE("a full schedule sees every address") {
  SyntheticMailParams p;
  p.messages = 200;
  p.people = 100;
  p.top_address_count = 50;
  const auto corpus = make_synthetic_mail(p);
  const auto table = build_index_table(corpus);
  CheckpointSchedule sched{3, 10, 4};
  std::vector<CheckpointArtifact> cks;
  run_schedule(corpus, sched, 2, 0.01, [&](const CheckpointView& v) {
    cks.push_back(ckpt(v.checkpoint_index, v.seen_datapoint_ids));
  });
  const auto seen = compute_seen_sets(cks, table);
  REQUIRE(seen.size() == 30);
  std::set<EmailAddress> unique;
  for (const auto& r : table) unique.insert(r.email);
  CHECK(seen.back().emails == unique);
  for (std::size_t i = 1; i < seen.size(); ++i) {
    CHECK(std::includes(seen[i].emails.begin(), seen[i].emails.end(),
                        seen[i - 1].emails.begin(), seen[i - 1].emails.end()));
  }
}

TEST_CASE("summaries average the series") {
  std::vector<CheckpointMetrics> one{{1, 0.5, 2.0, -1.0, 7.0}};
  const auto s1 = summarize("rmft", one);
  CHECK(s1.technique == "rmft");
  CHECK(s1.ter == 0.5);
  CHECK(s1.ser == 2.0);
  CHECK(s1.mdp == -1.0);
  CHECK(s1.ppl == 7.0);

  std::vector<CheckpointMetrics> two{{1, 0.2, 1.0, 0.0, 6.0}, {2, 0.4, 3.0, 2.0, 8.0}};
  const auto s2 = summarize("baseline", two);
  CHECK(s2.ter == doctest::Approx(0.3));
  CHECK(s2.ser == 2.0);
  CHECK(s2.mdp == 1.0);
  CHECK(s2.ppl == 7.0);
  CHECK_THROWS_AS(summarize("x", {}), DomainError);
}

TEST_CASE("summary CSV has the technique, ppl, ter, ser layout") {
  std::vector<SummaryRow> rows{{"Baseline", 6.432, 0.308, 0.342, 0.0},
                               {"RMFT", 6.798, 0.049, 0.059, 0.366},
                               {"Deduplication", 7.963, 0.084, 0.102, 1.531}};
  std::ostringstream out;
  write_summary_csv(rows, out);
  const auto parsed = parse_csv(out.str());
  REQUIRE(parsed.size() == 4);
  CHECK(parsed[0] == std::vector<std::string>{"technique", "ppl", "ter", "ser"});
  CHECK(parsed[2][0] == "RMFT");
  CHECK(parse_double(parsed[2][1]) == 6.798);
  CHECK(parse_double(parsed[3][2]) == 0.084);
  CHECK(parse_double(parsed[1][3]) == 0.342);
}

TEST_CASE("series CSV round-trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 100.0);
  std::vector<CheckpointMetrics> series;
  for (std::size_t i = 1; i <= 30; ++i) series.push_back({i, u(rng), u(rng), u(rng), u(rng)});
  rmft::testing::TempDir dir;
  std::ostringstream out;
  write_series_csv(series, out);
  write_file(dir / "s.csv", out.str());
  const auto back = read_series_csv(dir / "s.csv");
  REQUIRE(back.size() == series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(back[i].checkpoint_index == series[i].checkpoint_index);
    CHECK(back[i].ter == series[i].ter);
    CHECK(back[i].ser == series[i].ser);
    CHECK(back[i].mdp == series[i].mdp);
    CHECK(back[i].avg_ppl == series[i].avg_ppl);
  }

  write_file(dir / "bad.csv", "checkpoint,ter\n1,2\n");
  CHECK_THROWS_AS(read_series_csv(dir / "bad.csv"), FormatError);
  write_file(dir / "bad2.csv", "checkpoint,ter,ser,mdp,avg_ppl\n1,2,3\n");
  CHECK_THROWS_AS(read_series_csv(dir / "bad2.csv"), FormatError);
  write_file(dir / "bad3.csv", "checkpoint,ter,ser,mdp,avg_ppl\n1,2,x,4,5\n");
  CHECK_THROWS_AS(read_series_csv(dir / "bad3.csv"), FormatError);
}

TEST_CASE("evaluate_series by hand") {
  // Original corpus knows a, b, c; training replaced c with z.
  const std::vector<std::string> original{"From: a.a@x.com\nTo: c.c@x.com\n\nhi",
                                          "From: b.b@x.com\n\nhi"};
  const std::vector<std::string> trained{"From: a.a@x.com\nTo: z.z@x.com\n\nhi",
                                         "From: b.b@x.com\n\nhi"};
  MetricCase c{original, trained, {}, {}};
  auto t1 = ckpt(1, {0}), t2 = ckpt(2, {0, 1});
  t1.generations = {"a.a@x.com z.z@x.com"};
  t2.generations = {"c.c@x.com", "b.b@x.com"};
  t1.per_prompt_perplexity = {4, 6};
  t2.per_prompt_perplexity = {3, 3};
  auto b1 = ckpt(1, {0}), b2 = ckpt(2, {0, 1});
  b1.per_prompt_perplexity = {2, 2};
  b2.per_prompt_perplexity = {3, 1};
  c.technique = {t1, t2};
  c.baseline = {b1, b2};

  const auto series = evaluate(c);
  REQUIRE(series.size() == 2);
  // og = {a, b, c}. Seen in training: {a} then {a, b}; z is not original.
  CHECK(series[0].ter == doctest::Approx(100.0 / 3));
  CHECK(series[0].ser == 100.0);
  CHECK(series[0].mdp == 3.0);
  CHECK(series[0].avg_ppl == 5.0);
  CHECK(series[1].ter == doctest::Approx(200.0 / 3));
  CHECK(series[1].ser == 100.0);  // c leaks without being seen
  CHECK(series[1].mdp == 1.0);
  CHECK(series[1].avg_ppl == 3.0);

  c.baseline.pop_back();
  CHECK_THROWS_AS(evaluate(c), DomainError);
  c.baseline = {b2, b1};
  CHECK_THROWS_AS(evaluate(c), OrderingError);
}

TEST_CASE("evaluate_series matches an exhaustive rescan") {
  std::mt19937_64 rng(20240501);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = rmft::testing::random_metric_case(rng);
    const auto expect = rmft::testing::oracle_series(c);
    const auto got = evaluate(c);
    REQUIRE(got.size() == expect.ter.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k].ter - expect.ter[k]) <= 1e-9);
      CHECK(std::abs(got[k].ser - expect.ser[k]) <= 1e-9);
      CHECK(std::abs(got[k].mdp - expect.mdp[k]) <= 1e-9);
      CHECK(std::abs(got[k].avg_ppl - expect.avg_ppl[k]) <= 1e-9);
      CHECK(got[k].ter >= 0.0);
      CHECK(got[k].ter <= 100.0);
    }
  }
}

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

#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "email_oracle.hpp"
#include "rmft/csv.hpp"
#include "rmft/errors.hpp"
#include "rmft/pii_index.hpp"
#include "rmft/rng.hpp"
#include "rmft/synth.hpp"
#include "test_util.hpp"

using namespace rmft;
using rmft::testing::oracle_detect;
using rmft::testing::OracleMatch;

namespace {

std::vector<OracleMatch> library_detect(const std::string& text) {
  std::vector<OracleMatch> out;
  for (const auto& m : detect_emails(text)) out.push_back({m.start, m.end, m.email.canonical()});
  return out;
}

std::vector<std::string> canonicals(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& m : detect_emails(text)) out.push_back(m.email.canonical());
  return out;
}

// Noise interleaved with near-addresses whose parts are sometimes malformed.
std::string random_mail_text(Rng& rng) {
  static const std::vector<std::string> kNoise = {
      " ", " ", ",", "\n", "<", ">", "_", "-", ".", "@", "%", "+", "9", "\t", "\xc3\xa9", "x",
  };
  static const std::vector<std::string> kNames = {"kay", "Mann", "a", "b-c", "Q", "x-", "",
                                                  "x1", "_z", "mary-jo"};
  static const std::vector<std::string> kLabels = {"enron", "att", "x-1", "9", "", "ect", "MAIL"};
  static const std::vector<std::string> kTlds = {"com", "ORG", "net", "io", "c", "co", "9x", ""};
  auto pick = [&](const std::vector<std::string>& v) { return v[uniform_index(rng, v.size())]; };
  std::string s;
  const auto n = uniform_index(rng, 8);
  for (std::size_t i = 0; i < n; ++i) {
    if (uniform_index(rng, 2) == 0) {
      s += pick(kNoise);
      continue;
    }
    s += pick(kNames);
    if (uniform_index(rng, 8) != 0) s += ".";
    s += pick(kNames);
    if (uniform_index(rng, 10) == 0) s += "." + pick(kNames);
    s += uniform_index(rng, 10) == 0 ? "@@" : "@";
    const auto labels = 1 + uniform_index(rng, 3);
    for (std::size_t l = 0; l < labels; ++l) s += pick(kLabels) + ".";
    s += pick(kTlds);
  }
  return s;
}

Corpus corpus_of(std::vector<std::string> texts) {
  return Corpus::from_texts("t", std::move(texts));
}

}  // namespace

TEST_CASE("detects the example sender address") {
  const auto m = detect_emails("From: kay.mann@enron.com");
  REQUIRE(m.size() == 1);
  CHECK(m[0].email.canonical() == "kay.mann@enron.com");
  CHECK(m[0].start == 6);
  CHECK(m[0].end == 24);
}

TEST_CASE("no addresses") { CHECK(detect_emails("no addresses here").empty()); }

TEST_CASE("only first.last addresses match") {
  const auto m = canonicals("a@b.c john.doe@x.org jane@y.net");
  CHECK(m == std::vector<std::string>{"john.doe@x.org"});
}

TEST_CASE("address parts") {
  const auto e = EmailAddress::parse("Suzanne.Adams@ATT.net");
  REQUIRE(e);
  CHECK(e->canonical() == "suzanne.adams@att.net");
  CHECK(e->first() == "suzanne");
  CHECK(e->last() == "adams");
  CHECK(e->host() == "att.net");
  CHECK(e->domain() == "att");
  CHECK(e->tld() == "net");

  const auto multi = EmailAddress::parse("holly.gay@ect.enron.com");
  REQUIRE(multi);
  CHECK(multi->domain() == "ect.enron");
  CHECK(multi->tld() == "com");
  CHECK(multi->host() == "ect.enron.com");
}

TEST_CASE("parse requires the whole string") {
  CHECK_FALSE(EmailAddress::parse(" kay.mann@enron.com"));
  CHECK_FALSE(EmailAddress::parse("kay.mann@enron.com "));
  CHECK_FALSE(EmailAddress::parse("kay@enron.com"));
  CHECK_FALSE(EmailAddress::parse("kay.mann@enron.c"));
  CHECK_FALSE(EmailAddress::parse("kay.mann@enron"));
  CHECK_FALSE(EmailAddress::parse("k1.mann@enron.com"));
  CHECK_FALSE(EmailAddress::parse("kay.mann.x@enron.com"));
  CHECK_FALSE(EmailAddress::parse(""));
  CHECK(EmailAddress::parse("mary-jo.van-dyke@x-1.org"));
}

TEST_CASE("from_parts validates and canonicalizes") {
  CHECK(EmailAddress::from_parts("Bob", "Mann", "yahoo", "org").canonical() == "bob.mann@yahoo.org");
  CHECK(EmailAddress::from_parts("bob", "mann", "mail.yahoo.org").domain() == "mail.yahoo");
  CHECK_THROWS_AS(EmailAddress::from_parts("", "mann", "yahoo.org"), DomainError);
  CHECK_THROWS_AS(EmailAddress::from_parts("bob", "m.ann", "yahoo.org"), DomainError);
  CHECK_THROWS_AS(EmailAddress::from_parts("bob", "mann", "yahoo"), DomainError);
  CHECK_THROWS_AS(EmailAddress::from_parts("bob", "mann", "yahoo", "o"), DomainError);
}

TEST_CASE("canonical round-trips through parse") {
  Rng rng(5);
  const auto population = synthetic_population(500, 3);
  for (const auto& e : population) {
    const auto again = EmailAddress::parse(e.canonical());
    REQUIRE(again);
    REQUIRE(*again == e);
    REQUIRE(again->domain() == e.domain());
  }
}

TEST_CASE("boundary cases") {
  struct Case {
    const char* text;
    std::vector<std::string> expected;
  };
  const std::vector<Case> cases = {
      {"<Kay.Mann@Enron.COM>", {"kay.mann@enron.com"}},
      {"x.john.doe@x.org", {}},
      {"-john.doe@x.org", {}},
      {"john.doe-@x.org", {"john.doe-@x.org"}},
      {"john.doe@x.org_", {}},
      {"john.doe@x.org-y", {}},
      {"john.doe@x.org.", {"john.doe@x.org"}},
      {"john.doe@x.org.123", {"john.doe@x.org"}},
      {"john.doe@mail.x.co.uk, end", {"john.doe@mail.x.co.uk"}},
      {"a.b@x.com,c.d@y.org", {"a.b@x.com", "c.d@y.org"}},
      {"a.b@x.com.c.d@y.org", {"a.b@x.com"}},
      {"a.b@@x.com", {}},
      {"a.b@x..com", {}},
      {"a.b@.x.com", {}},
      {"caf\xc3\xa9 a.b@x.com\xc3\xa9", {"a.b@x.com"}},
  };
  for (const auto& c : cases) {
    INFO(c.text);
    CHECK(canonicals(c.text) == c.expected);
    std::vector<std::string> oracle;
    for (const auto& m : oracle_detect(c.text)) oracle.push_back(m.canonical);
    CHECK(oracle == c.expected);
  }
}

TEST_CASE("detector agrees with the regex oracle on random text") {
  Rng rng(2024);
  std::size_t with_matches = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const auto text = random_mail_text(rng);
    const auto expected = oracle_detect(text);
    with_matches += !expected.empty();
    INFO(text);
    REQUIRE(library_detect(text) == expected);
  }
  CHECK(with_matches > 2000);  // the generator actually produces addresses
}

TEST_CASE("matches are ordered, disjoint and re-parse") {
  Rng rng(8);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto text = random_mail_text(rng);
    std::size_t prev_end = 0;
    for (const auto& m : detect_emails(text)) {
      REQUIRE(m.start >= prev_end);
      REQUIRE(m.start < m.end);
      prev_end = m.end;
      const auto again = EmailAddress::parse(std::string_view(text).substr(m.start, m.end - m.start));
      REQUIRE(again);
      REQUIRE(*again == m.email);
    }
  }
}

TEST_CASE("detection is idempotent under canonicalization") {
  Rng rng(9);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto first = canonicals(random_mail_text(rng));
    std::string rebuilt;
    for (const auto& c : first) rebuilt += c + " ";
    REQUIRE(canonicals(rebuilt) == first);
  }
}

TEST_CASE("index table over two datapoints with three addresses each") {
  const auto c = corpus_of({"a.b@x.com c.d@x.com e.f@x.com", "g.h@y.org\n\ni.j@y.org k.l@y.org"});
  const auto t = build_index_table(c);
  CHECK(t.size() == 6);
  CHECK(t.rows()[3].datapoint_id == 1);
  CHECK(t.rows()[3].in_header);
  CHECK_FALSE(t.rows()[4].in_header);
  CHECK(t.header_rows().size() == 1);
}

TEST_CASE("empty corpus gives an empty table") {
  const auto t = build_index_table(Corpus{});
  CHECK(t.empty());
  CHECK(unique_emails(t).empty());
  CHECK(frequency_report(t, 10).empty());
}

TEST_CASE("in_header follows the header block") {
  const auto c = corpus_of({rmft::testing::kSampleMessage});
  const auto t = build_index_table(c);
  REQUIRE(t.size() == 2);
  CHECK(t.rows()[0].email.canonical() == "kay.mann@enron.com");
  CHECK(t.rows()[0].in_header);
  CHECK(t.rows()[1].email.canonical() == "suzanne.adams@att.net");
  CHECK(t.rows()[1].in_header);
  // Addresses in a text with no blank line are body addresses.
  CHECK_FALSE(build_index_table(corpus_of({"From: a.b@x.com"})).rows()[0].in_header);
}

TEST_CASE("table sorts rows given out of order") {
  const auto e = *EmailAddress::parse("a.b@x.com");
  IndexTable t({{1, 0, 9, e, false}, {0, 10, 19, e, false}, {0, 0, 9, e, true}});
  CHECK(t.rows()[0].datapoint_id == 0);
  CHECK(t.rows()[0].start == 0);
  CHECK(t.rows()[1].start == 10);
  CHECK(t.rows()[2].datapoint_id == 1);
}

TEST_CASE("top address of the duplication fixture occurs 900 times") {
  const auto c = make_synthetic_mail(SyntheticMailParams{});
  const auto t = build_index_table(c);
  const auto top = frequency_report(t, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].email.canonical() == "kay.mann@enron.com");
  CHECK(top[0].count == 900);
}

TEST_CASE("index table invariants on synthetic mail") {
  SyntheticMailParams p;
  p.messages = 300;
  p.top_address_count = 100;
  const auto c = make_synthetic_mail(p);
  const auto t = build_index_table(c);
  const auto parallel = build_index_table(c, 4);
  REQUIRE(t.rows().size() == parallel.rows().size());

  std::size_t expected_rows = 0;
  for (const auto& dp : c) expected_rows += oracle_detect(dp.full_text()).size();
  CHECK(t.size() == expected_rows);

  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& r = t.rows()[i];
    const auto& p2 = parallel.rows()[i];
    REQUIRE((r.datapoint_id == p2.datapoint_id && r.start == p2.start && r.email == p2.email));
    const auto& text = c[r.datapoint_id].full_text();
    REQUIRE(r.end <= text.size());
    REQUIRE(*EmailAddress::parse(std::string_view(text).substr(r.start, r.end - r.start)) ==
            r.email);
    if (i > 0) {
      const auto& prev = t.rows()[i - 1];
      REQUIRE((prev.datapoint_id < r.datapoint_id ||
               (prev.datapoint_id == r.datapoint_id && prev.end <= r.start)));
    }
  }
}

TEST_CASE("frequency report ordering") {
  const auto a = *EmailAddress::parse("a.a@x.com");
  const auto b = *EmailAddress::parse("b.b@x.com");
  const auto c = *EmailAddress::parse("c.c@x.com");
  std::vector<OccurrenceRecord> rows;
  std::size_t pos = 0;
  auto add = [&](const EmailAddress& e, int n) {
    for (int i = 0; i < n; ++i, pos += 10) rows.push_back({0, pos, pos + 9, e, false});
  };
  add(a, 5);
  add(b, 3);
  add(c, 1);
  const IndexTable t(rows);

  const auto top2 = frequency_report(t, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0].email == a);
  CHECK(top2[0].count == 5);
  CHECK(top2[1].email == b);
  CHECK(top2[1].count == 3);
  CHECK(frequency_report(t, 0).empty());

  std::size_t sum = 0;
  for (const auto& e : frequency_report(t, 1000)) sum += e.count;
  CHECK(sum == t.size());
}

TEST_CASE("frequency ties go to the smaller canonical in either input order") {
  const auto a = *EmailAddress::parse("a.a@x.com");
  const auto b = *EmailAddress::parse("b.b@x.com");
  std::vector<OccurrenceRecord> ab, ba;
  for (std::size_t i = 0; i < 8; ++i) {
    ab.push_back({i, 0, 9, i < 4 ? a : b, false});
    ba.push_back({i, 0, 9, i < 4 ? b : a, false});
  }
  CHECK(frequency_report(IndexTable(ab), 1)[0].email == a);
  CHECK(frequency_report(IndexTable(ba), 1)[0].email == a);
}

TEST_CASE("frequency counts sum to the row count on synthetic mail") {
  SyntheticMailParams p;
  p.messages = 200;
  p.top_address_count = 150;
  const auto t = build_index_table(make_synthetic_mail(p));
  std::size_t sum = 0;
  for (const auto& e : frequency_report(t, t.size())) sum += e.count;
  CHECK(sum == t.size());
}

TEST_CASE("unique emails") {
  const auto a = *EmailAddress::parse("a.a@x.com");
  const auto b = *EmailAddress::parse("b.b@x.com");
  const IndexTable t({{0, 0, 9, a, false}, {0, 10, 19, a, false}, {1, 0, 9, b, false}});
  CHECK(unique_emails(t) == std::set<EmailAddress>{a, b});
}

TEST_CASE("unique count at full corpus scale matches a naive recount") {
  SyntheticMailParams p;
  p.messages = 10000;
  p.people = 3000;
  p.top_address_count = 900;
  const auto c = make_synthetic_mail(p);
  const auto t = build_index_table(c, 2);
  CHECK(static_cast<double>(t.size()) / static_cast<double>(c.size()) == doctest::Approx(6.0).epsilon(0.1));

  // Two passes: collect every token around '@', then keep the well-formed ones.
  std::set<std::string> naive;
  for (const auto& dp : c) {
    const auto& text = dp.full_text();
    std::vector<std::string> tokens;
    std::string tok;
    for (char ch : text) {
      if (ch == ' ' || ch == '\n' || ch == ',' || ch == '<' || ch == '>') {
        if (!tok.empty()) tokens.push_back(tok);
        tok.clear();
      } else {
        tok += ch;
      }
    }
    if (!tok.empty()) tokens.push_back(tok);
    for (const auto& tk : tokens) {
      if (tk.find('@') == std::string::npos) continue;
      for (const auto& m : oracle_detect(tk)) naive.insert(m.canonical);
    }
  }
  CHECK(unique_emails(t).size() == naive.size());
}

TEST_CASE("index CSV export") {
  const auto t = build_index_table(corpus_of({"H: a.b@x.com\n\nsee \"c.d@y.org\""}));
  std::ostringstream out;
  write_index_csv(t, out);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"datapoint_id", "start", "end", "email", "in_header"});
  CHECK(rows[1] == std::vector<std::string>{"0", "3", "12", "a.b@x.com", "true"});
  CHECK(rows[2] == std::vector<std::string>{"0", "19", "28", "c.d@y.org", "false"});
}

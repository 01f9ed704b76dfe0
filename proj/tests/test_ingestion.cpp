#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "infodemic/error.hpp"
#include "infodemic/ingestion.hpp"
#include "infodemic/rng.hpp"

using namespace infodemic;

namespace {

ParsedLog parse_csv(const std::string& text, double limit = 0.01) {
  std::istringstream in(text);
  return parse_events(in, {Format::Csv, limit});
}

EventLog random_log(Rng& rng, std::size_t n) {
  EventLogBuilder b;
  for (std::size_t i = 0; i < n; ++i) {
    ShareEvent e;
    e.timestamp = 1579651200 + static_cast<std::int64_t>(rng.index(86400 * 30));
    e.actor = b.user("user " + std::to_string(rng.index(20)));
    do {
      e.source = b.user("user " + std::to_string(rng.index(20)));
    } while (e.source == e.actor);
    const auto cat = rng.index(8);
    e.category = static_cast<ContentCategory>(cat);
    e.category_pinned = cat != 0;
    if (rng.bernoulli(0.7)) e.domain = b.domain("site" + std::to_string(rng.index(6)) + ".org");
    e.kind = static_cast<ShareKind>(rng.index(3));
    b.add(e);
  }
  return std::move(b).finish();
}

}  // namespace

TEST_CASE("out-of-order lines come back sorted") {
  const auto p = parse_csv(
      "timestamp,actor,source\n"
      "300,a,b\n"
      "100,b,c\n"
      "200,c,a\n");
  REQUIRE(p.log.size() == 3);
  CHECK(std::is_sorted(p.log.events.begin(), p.log.events.end(),
                       [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; }));
  CHECK(p.log.window == TimeWindow{100, 300});
}

TEST_CASE("empty stream gives an empty log") {
  const auto p = parse_csv("");
  CHECK(p.log.empty());
  CHECK(p.log.window.start == p.log.window.end);
}

TEST_CASE("one malformed line in ten exceeds a 1% limit") {
  std::string text = "timestamp,actor,source\n";
  for (int i = 0; i < 9; ++i) text += std::to_string(i) + ",a,b\n";
  text += "not-a-time,a,b\n";
  try {
    parse_csv(text);
    FAIL("expected TooManyMalformed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooManyMalformed);
    CHECK(e.detail() == "1");
  }
  const auto lenient = parse_csv(text, 0.2);
  CHECK(lenient.report.malformed == 1);
  CHECK(lenient.log.size() == 9);
}

TEST_CASE("self-shares are dropped and counted") {
  const auto p = parse_csv("timestamp,actor,source\n1,a,a\n2,a,b\n");
  CHECK(p.log.size() == 1);
  CHECK(p.report.self_shares == 1);
}

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("1579651200") == 1579651200);
  CHECK(parse_timestamp("2020-01-22") == 1579651200);
  CHECK(parse_timestamp("2020-01-22T01:00:00Z") == 1579654800);
  CHECK(parse_timestamp("2020-01-22T03:00:00+02:00") == 1579654800);
  CHECK(parse_timestamp("2020-01-22T01:00:00.75") == 1579654800);
  CHECK_FALSE(parse_timestamp("2020-02-30"));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK(day_of(-1) == -1);
  CHECK(day_of(86399) == 0);
}

TEST_CASE("csv and jsonl round trip exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto log = random_log(rng, 50);
    for (Format f : {Format::Csv, Format::Jsonl}) {
      std::ostringstream out;
      write_events(out, log, f);
      std::istringstream in(out.str());
      const auto back = parse_events(in, {f, 0.0}).log;
      REQUIRE(back.size() == log.size());
      // Ids are re-interned in file order, so compare by name.
      for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& a = log.events[i];
        const auto& b = back.events[i];
        CHECK(a.timestamp == b.timestamp);
        CHECK(log.users[a.actor] == back.users[b.actor]);
        CHECK(log.users[a.source] == back.users[b.source]);
        CHECK((a.domain == kNoDomain) == (b.domain == kNoDomain));
        if (a.domain != kNoDomain) CHECK(log.domains[a.domain] == back.domains[b.domain]);
        CHECK(a.category == b.category);
        CHECK(a.category_pinned == b.category_pinned);
        CHECK(a.kind == b.kind);
      }
      // A parsed log is canonical: a second trip is exact.
      std::ostringstream again;
      write_events(again, back, f);
      CHECK(again.str() == out.str());
      std::istringstream in2(again.str());
      const auto third = parse_events(in2, {f, 0.0}).log;
      CHECK(third.events == back.events);
      CHECK(third.users == back.users);
      CHECK(third.domains == back.domains);
      CHECK(third.window == back.window);
    }
  }
}

TEST_CASE("jsonl accepts the same fields") {
  std::istringstream in(
      R"({"timestamp":"2020-01-22","actor":"a","source":"b","domain":"Example-Hoax.net","kind":"reply"})"
      "\n");
  const auto p = parse_events(in, {Format::Jsonl, 0.0});
  REQUIRE(p.log.size() == 1);
  CHECK(p.log.domains[p.log.events[0].domain] == "example-hoax.net");
  CHECK(p.log.events[0].kind == ShareKind::Reply);
}

TEST_CASE("labeling through the category table") {
  std::istringstream table_in("domain,category\nexample-hoax.net,FakeHoax\nnews.example,MainstreamMedia\n");
  const auto table = parse_category_table(table_in);
  const auto p = parse_csv(
      "timestamp,actor,source,domain,category\n"
      "1,a,b,example-hoax.net,\n"
      "2,a,b,,\n"
      "3,a,b,news.example,Satire\n"
      "4,a,b,unknown.org,\n");
  const auto log = label_events(p.log, table);
  CHECK(log.events[0].category == ContentCategory::FakeHoax);
  CHECK(log.events[1].category == ContentCategory::Unlabeled);
  CHECK(log.events[2].category == ContentCategory::Satire);  // pinned on the record
  CHECK(log.events[3].category == ContentCategory::Unlabeled);

  std::istringstream dup("domain,category\na.net,Satire\nA.net,Science\n");
  CHECK_THROWS_AS(parse_category_table(dup), Error);
  std::istringstream bad("domain,category\na.net,Fake\n");
  CHECK_THROWS_AS(parse_category_table(bad), Error);
}

TEST_CASE("label count matches a direct scan") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto log = random_log(rng, 200);
    for (auto& e : log.events) {
      e.category = ContentCategory::Unlabeled;
      e.category_pinned = false;
    }
    CategoryTable table;
    for (std::size_t d = 0; d < log.domains.size(); ++d) {
      if (rng.bernoulli(0.5)) table.entries[log.domains[d]] = kLabeledCategories[rng.index(7)];
    }
    std::size_t expected = 0;
    for (const auto& e : log.events) expected += e.domain != kNoDomain && table.entries.contains(log.domains[e.domain]);
    const auto labeled = label_events(log, table);
    CHECK(labeled.size() == log.size());
    const auto got = std::count_if(labeled.events.begin(), labeled.events.end(),
                                   [](const auto& e) { return e.category != ContentCategory::Unlabeled; });
    CHECK(static_cast<std::size_t>(got) == expected);
  }
}

TEST_CASE("filtering") {
  Rng rng(8);
  const auto log = random_log(rng, 300);

  const auto all = filter_events(log, {log.window.start, log.window.end, false});
  CHECK(all.events == log.events);
  CHECK(all.users == log.users);

  const auto none = filter_events(log, {log.window.end + 1, log.window.end + 100, false});
  CHECK(none.empty());

  const auto labeled = filter_events(log, {std::nullopt, std::nullopt, true});
  const auto expected = std::count_if(log.events.begin(), log.events.end(),
                                      [](const auto& e) { return e.category != ContentCategory::Unlabeled; });
  CHECK(labeled.size() == static_cast<std::size_t>(expected));
  for (const auto& e : labeled.events) CHECK(e.category != ContentCategory::Unlabeled);

  const auto twice = filter_events(labeled, {std::nullopt, std::nullopt, true});
  CHECK(twice.events == labeled.events);
}

TEST_CASE("fake categories") {
  int fake = 0;
  for (auto c : kLabeledCategories) fake += is_fake(c);
  CHECK(fake == 3);
  CHECK_FALSE(is_fake(ContentCategory::Unlabeled));
  for (auto c : kLabeledCategories) CHECK(parse_category(category_name(c)) == c);
  CHECK_FALSE(parse_category("Unlabeled"));
  CHECK_FALSE(parse_category("fakehoax"));
}

TEST_CASE("unreadable file") {
  CHECK_THROWS_AS(parse_events_file("/nonexistent/events.csv", {}), Error);
}

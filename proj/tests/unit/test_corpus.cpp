#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>

#include "../support/generators.hpp"
#include "../support/tempdir.hpp"
#include "stresslens/corpus.hpp"
#include "stresslens/error.hpp"

using namespace stresslens;

namespace {

Corpus texts(std::initializer_list<const char*> ts, Track track = Track::stress) {
  Corpus c;
  c.track = track;
  int i = 0;
  for (const char* t : ts) c.records.push_back({"r" + std::to_string(i++), t, {}, {}, {}});
  return c;
}

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("load_corpus keeps file order") {
  testutil::TempDir dir;
  testutil::write_file(dir / "c.jsonl",
                       "{\"id\":\"a\",\"text\":\"first\"}\n"
                       "{\"id\":\"b\",\"text\":\"second\",\"city\":\"new_york\"}\n"
                       "{\"id\":\"c\",\"text\":\"third\",\"created_at\":\"2014-03-01T12:00:00Z\"}\n");
  const Corpus c = load_corpus(dir / "c.jsonl", Track::stress);
  REQUIRE(c.size() == 3);
  CHECK(c.records[0].id == "a");
  CHECK(c.records[1].city == "new_york");
  CHECK(c.records[2].created_at == "2014-03-01T12:00:00Z");
  CHECK(c.track == Track::stress);
}

TEST_CASE("load_corpus names the failing line") {
  testutil::TempDir dir;
  testutil::write_file(dir / "bad.jsonl", "{\"id\":\"a\",\"text\":\"ok\"}\n{\"id\":\"b\"}\n");
  const std::string msg = error_of([&] { load_corpus(dir / "bad.jsonl", Track::stress); });
  CHECK(msg.find("line 2: missing field text") != std::string::npos);
  CHECK_THROWS_AS(load_corpus(dir / "bad.jsonl", Track::stress), DataError);
}

TEST_CASE("parse errors") {
  CHECK(error_of([] { parse_corpus("{\"id\":\"a\",\"text\":\"x\"}\n\n{\"id\":\"a\",\"text\":\"y\"}\n", Track::stress); })
            .find("line 3: duplicate id 'a' (first seen on line 1)") != std::string::npos);
  CHECK_THROWS_AS(parse_corpus("", Track::stress), DataError);
  CHECK_THROWS_AS(parse_corpus("\n  \n", Track::stress), DataError);
  CHECK_THROWS_AS(parse_corpus("{not json}\n", Track::stress), DataError);
  CHECK(error_of([] { parse_corpus("{\"id\":\"a\",\"text\":\"x\"}\n[1]\n", Track::stress); }).find("line 2") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_record(R"({"id":"","text":"x"})", Track::stress), DataError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":"   "})", Track::stress), DataError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":"x","created_at":"yesterday"})", Track::stress), DataError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":7})", Track::stress), DataError);
  CHECK_NOTHROW(parse_record(std::string(R"({"id":"a","text":")") + std::string(2000, 'x') + "\"}", Track::stress));
  CHECK_THROWS_AS(parse_record(std::string(R"({"id":"a","text":")") + std::string(2001, 'x') + "\"}", Track::stress),
                  DataError);
  // 2000 two-byte characters are 2000 characters, not 4000
  std::string wide;
  for (int i = 0; i < 2000; ++i) wide += "\xC3\xA9";
  CHECK_NOTHROW(parse_record(R"({"id":"a","text":")" + wide + "\"}", Track::stress));
}

TEST_CASE("label nesting") {
  CHECK_NOTHROW(parse_record(R"({"id":"a","text":"x","labels":{"relevant":true,"first_hand":true,"themes":["topic_work"]}})",
                             Track::stress));
  CHECK_NOTHROW(parse_record(R"({"id":"a","text":"x","labels":{"relevant":false}})", Track::stress));
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":"x","labels":{"first_hand":true}})", Track::stress), DataError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":"x","labels":{"relevant":false,"first_hand":false}})", Track::stress),
                  DataError);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":"x","labels":{"relevant":true,"first_hand":false,"themes":["topic_work"]}})",
                               Track::stress),
                  DataError);
  // theme names are track specific
  CHECK_THROWS_AS(parse_record(R"({"id":"a","text":"x","labels":{"relevant":true,"first_hand":true,"themes":["water"]}})",
                               Track::stress),
                  DataError);
  CHECK_NOTHROW(parse_record(R"({"id":"a","text":"x","labels":{"relevant":true,"first_hand":true,"themes":["water"]}})",
                             Track::relaxation));
}

TEST_CASE("round trip is the identity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Corpus c;
    c.track = trial % 2 ? Track::relaxation : Track::stress;
    const std::size_t n = 1 + gen::pick(rng, 8);
    for (std::size_t i = 0; i < n; ++i) {
      TweetRecord r;
      r.id = "id-" + std::to_string(i) + "\"\\";
      do r.text = gen::tweet_text(rng); while (r.text.find_first_not_of(" \t") == std::string::npos);
      if (gen::pick(rng, 2)) r.created_at = "2014-0" + std::to_string(1 + gen::pick(rng, 9)) + "-01T00:00:00Z";
      if (gen::pick(rng, 2)) r.city = "city_" + std::to_string(gen::pick(rng, 4));
      if (gen::pick(rng, 2)) {
        LabelSet l;
        l.relevant = gen::pick(rng, 2) == 1;
        if (*l.relevant && gen::pick(rng, 2)) {
          l.first_hand = gen::pick(rng, 2) == 1;
          if (*l.first_hand) l.themes = {ThemeId::all(c.track)[gen::pick(rng, 3)]};
        }
        r.labels = l;
      }
      c.records.push_back(r);
    }
    testutil::TempDir dir;
    write_corpus(c, dir / "c.jsonl");
    const Corpus back = load_corpus(dir / "c.jsonl", c.track);
    REQUIRE(back == c);
    for (std::size_t i = 0; i < n; ++i) CHECK(back.records[i].text == c.records[i].text);
    CHECK(serialize_corpus(back) == serialize_corpus(c));
  }
}

TEST_CASE("filter_keyword") {
  const Corpus c = texts({"I'm so STRESSED out", "relaxing by the pool", "mistress of ceremonies"});
  const Corpus f = filter_keyword(c, "stress");
  REQUIRE(f.size() == 2);
  CHECK(f.records[0].text == "I'm so STRESSED out");
  CHECK(f.records[1].text == "mistress of ceremonies");
  CHECK(filter_keyword(texts({"nothing here"}), "stress").empty());
  CHECK_THROWS_AS(filter_keyword(c, ""), std::invalid_argument);
}

TEST_CASE("filter_keyword properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Corpus c;
    const std::size_t n = gen::pick(rng, 10);
    for (std::size_t i = 0; i < n; ++i) c.records.push_back({std::to_string(i), gen::tweet_text(rng), {}, {}, {}});
    for (const char* kw : {"stress", "RELAX", "caf\xC3\xA9", "s"}) {
      const Corpus once = filter_keyword(c, kw);
      CHECK(filter_keyword(once, kw) == once);
      // subsequence of the input in the same order
      std::size_t j = 0;
      for (const auto& r : once.records) {
        while (j < c.size() && !(c.records[j] == r)) ++j;
        REQUIRE(j < c.size());
        ++j;
      }
    }
  }
}

TEST_CASE("filter_hashtags") {
  const auto stress_tags = seed_hashtags(Track::stress);
  const auto relax_tags = seed_hashtags(Track::relaxation);
  CHECK(stress_tags.size() == 9);
  CHECK(relax_tags.size() == 5);
  CHECK(std::find(stress_tags.begin(), stress_tags.end(), "#sostressed") != stress_tags.end());

  CHECK(filter_hashtags(texts({"ugh #sostressed"}), stress_tags).size() == 1);
  CHECK(filter_hashtags(texts({"#relax"}), stress_tags).empty());
  const std::vector<std::string> stressed{"#stressed"};
  CHECK(filter_hashtags(texts({"#stressedx"}), stressed).empty());
  CHECK(filter_hashtags(texts({"#STRESSED!!!"}), stressed).size() == 1);
  CHECK(filter_hashtags(texts({"so#stressed"}), stressed).empty());
  CHECK(filter_hashtags(texts({"me: #stressed"}), stressed).size() == 1);
  CHECK(filter_hashtags(texts({"#stressed_out"}), stressed).empty());
  CHECK(filter_hashtags(texts({"stressed"}), stressed).empty());

  const std::vector<std::string> bad{"stressed"};
  CHECK_THROWS_AS(filter_hashtags(texts({"x"}), bad), std::invalid_argument);
  CHECK_THROWS_AS(filter_hashtags(texts({"x"}), std::span<const std::string>{}), std::invalid_argument);
}

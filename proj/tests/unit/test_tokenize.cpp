#include <doctest.h>

#include <random>
#include <stdexcept>

#include "../support/generators.hpp"
#include "stresslens/error.hpp"
#include "stresslens/text.hpp"
#include "stresslens/tokenize.hpp"

using namespace stresslens;
using V = std::vector<std::string>;

TEST_CASE("tokenize examples") {
  CHECK(tokenize("I'm #stressed!! http://t.co/x1") == V{"i'm", "stressed", "http", "t", "co", "x1"});
  CHECK(tokenize("RT @camerondallas: so #SoRelaxing") == V{"rt", "camerondallas", "so", "sorelaxing"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  !!! ... ").empty());
  CHECK(tokenize("'quoted' don't ''") == V{"quoted", "don't"});
  CHECK(tokenize("it\xE2\x80\x99s") == V{"it's"});
  // NFC: decomposed e + combining acute becomes the precomposed letter
  CHECK(tokenize("Cafe\xCC\x81") == V{"caf\xC3\xA9"});
  CHECK(tokenize("\xC3\x89T\xC3\x89 2014") == V{"\xC3\xA9t\xC3\xA9", "2014"});
  CHECK(tokenize("stress\xF0\x9F\x98\xA9relax") == V{"stress", "relax"});
}

TEST_CASE("ngrams") {
  const V t{"high", "school", "sucks"};
  CHECK(ngrams(t, 2) == V{"high school", "school sucks"});
  CHECK(ngrams(V{"stressed"}, 2).empty());
  CHECK(ngrams(V{"a", "b"}, 1) == V{"a", "b"});
  CHECK(ngrams(V{}, 2).empty());
  CHECK_THROWS_AS(ngrams(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(ngrams(t, 3), std::invalid_argument);
}

TEST_CASE("token invariants on random text") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string s = gen::tweet_text(rng, 16);
    const TokenSeq t = tokenize(s);
    // idempotent normalization
    CHECK(tokenize(join_tokens(t)) == t);
    CHECK(ngrams(t, 2).size() == (t.empty() ? 0 : t.size() - 1));
    for (const auto& tok : t) {
      REQUIRE(!tok.empty());
      CHECK(tok.front() != '\'');
      CHECK(tok.back() != '\'');
      CHECK(text::normalize_lower(tok) == tok);
      CHECK(tok.find_first_of(" #@\t.,!") == std::string::npos);
    }
  }
}

TEST_CASE("invalid UTF-8 is a data error") {
  CHECK_THROWS_AS(tokenize("bad \xC3("), DataError);
}

TEST_CASE("build_vocabulary") {
  const std::vector<TokenSeq> docs{{"a", "b"}, {"b", "c"}};
  const Vocabulary v = build_vocabulary(docs);
  CHECK(v.terms() == V{"a", "b", "c"});
  CHECK(v.doc_freqs() == std::vector<std::uint32_t>{1, 2, 1});
  CHECK(build_vocabulary(docs, 2).terms() == V{"b"});
  CHECK(build_vocabulary(docs) == v);
  CHECK(v.find("b") == 1);
  CHECK(v.find("z") == -1);
  CHECK_THROWS_AS(build_vocabulary(std::span<const TokenSeq>{}), DataError);

  // repeated tokens inside one document count once toward doc_freq
  const std::vector<TokenSeq> rep{{"a", "a", "a"}};
  CHECK(build_vocabulary(rep).doc_freqs() == std::vector<std::uint32_t>{1});

  Corpus c;
  c.records = {{"1", "A b", {}, {}, {}}, {"2", "b C", {}, {}, {}}};
  CHECK(build_vocabulary(c) == v);
  CHECK_THROWS_AS(build_vocabulary(Corpus{}), DataError);
  CHECK_THROWS_AS(Vocabulary({"a", "a"}, {1, 1}), std::invalid_argument);
}

TEST_CASE("vocabulary index is a bijection") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenSeq> docs(1 + gen::pick(rng, 6));
    for (auto& d : docs)
      for (std::size_t i = gen::pick(rng, 8); i > 0; --i) d.push_back(gen::word(rng, 12));
    const Vocabulary v = build_vocabulary(docs);
    for (TermId id = 0; id < v.size(); ++id) {
      CHECK(v.find(v.term(id)) == id);
      CHECK(v.doc_freq(id) >= 1);
    }
  }
}

TEST_CASE("vectorize") {
  const Vocabulary v({"a", "b", "c"}, {1, 1, 1});
  const FeatureVector x = vectorize(V{"b", "b", "z"}, v);
  CHECK(x.entries == std::vector<std::pair<TermId, std::uint32_t>>{{1, 2}});
  CHECK(x.count(1) == 2);
  CHECK(x.count(0) == 0);
  CHECK(vectorize(V{}, v).entries.empty());
  CHECK(vectorize(V{"b", "b", "z", "zz"}, v) == x);
  CHECK(vectorize(V{"c", "a", "c"}, v).entries == std::vector<std::pair<TermId, std::uint32_t>>{{0, 1}, {2, 2}});
  CHECK(binarize(vectorize(V{"c", "a", "c"}, v)).entries ==
        std::vector<std::pair<TermId, std::uint32_t>>{{0, 1}, {2, 1}});

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    TokenSeq t;
    for (std::size_t i = gen::pick(rng, 10); i > 0; --i) t.push_back(gen::word(rng, 5));
    const FeatureVector f = vectorize(t, v);
    CHECK(f.total() <= t.size());
    for (const auto& [id, n] : f.entries) CHECK(n >= 1);
    for (std::size_t i = 1; i < f.entries.size(); ++i) CHECK(f.entries[i - 1].first < f.entries[i].first);
  }
}

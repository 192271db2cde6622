#include <doctest.h>

#include <algorithm>
#include <random>
#include <map>
#include <set>
#include <stdexcept>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "stresslens/error.hpp"
#include "stresslens/evaluate.hpp"
#include "stresslens/report.hpp"

using namespace stresslens;

TEST_CASE("metrics examples") {
  const MetricsReport a = metrics({.tp = 56, .fp = 8, .fn = 17, .tn = 19});
  CHECK(*a.accuracy == doctest::Approx(0.75));
  CHECK(*a.sensitivity == doctest::Approx(56.0 / 73.0));
  CHECK(*a.specificity == doctest::Approx(19.0 / 27.0));
  CHECK(*a.ppv == doctest::Approx(0.875));
  CHECK(format_metrics(a) == "75.00/76.71/70.37/87.50");

  const MetricsReport b = metrics({.tp = 56, .fp = 0, .fn = 8, .tn = 36});
  CHECK(*b.accuracy == 0.92);
  CHECK(*b.sensitivity == 0.875);
  CHECK(*b.specificity == 1.0);
  CHECK(*b.ppv == 1.0);

  const MetricsReport c = metrics({.tp = 0, .fp = 3, .fn = 0, .tn = 7});
  CHECK_FALSE(c.sensitivity.has_value());
  // TP + FP = 3, so PPV is defined (and zero)
  CHECK(*c.ppv == 0.0);
  CHECK(*c.specificity == doctest::Approx(0.7));
  CHECK(*c.accuracy == doctest::Approx(0.7));
  CHECK(format_metrics(c) == "70.00/NA/70.00/0.00");

  CHECK_THROWS_AS(metrics({}), std::invalid_argument);
}

TEST_CASE("confusion") {
  const std::vector<bool> all(5, true);
  CHECK(confusion(all, all) == ConfusionMatrix{5, 0, 0, 0});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen::pick(rng, 20);
    std::vector<bool> p(n), g(n), np(n), ng(n);
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = gen::pick(rng, 2);
      g[i] = gen::pick(rng, 2);
      np[i] = !p[i];
      ng[i] = !g[i];
      if (p[i] && g[i]) ++tp;
      if (p[i] && !g[i]) ++fp;
      if (!p[i] && g[i]) ++fn;
      if (!p[i] && !g[i]) ++tn;
    }
    const ConfusionMatrix cm = confusion(p, g);
    CHECK(cm == ConfusionMatrix{tp, fp, fn, tn});
    CHECK(cm.total() == n);
    // relabeling swaps tp/tn and fp/fn
    CHECK(confusion(np, ng) == ConfusionMatrix{tn, fn, fp, tp});
    // predictions negated: no true positives or true negatives survive
    const ConfusionMatrix neg = confusion(ng, g);
    CHECK(neg.tp == 0);
    CHECK(neg.tn == 0);

    const MetricsReport m = metrics(cm);
    CHECK(*m.accuracy == doctest::Approx(double(tp + tn) / n));
    CHECK(m.sensitivity.has_value() == (tp + fn > 0));
    CHECK(m.ppv.has_value() == (tp + fp > 0));
    CHECK(m.specificity.has_value() == (tn + fp > 0));
    if (m.sensitivity) CHECK(*m.sensitivity == doctest::Approx(double(tp) / (tp + fn)));
    if (m.ppv) CHECK(*m.ppv == doctest::Approx(double(tp) / (tp + fp)));
    if (m.specificity) CHECK(*m.specificity == doctest::Approx(double(tn) / (tn + fp)));
  }
  CHECK_THROWS_AS(confusion({true}, {true, false}), std::invalid_argument);
  CHECK_THROWS_AS(confusion({}, {}), std::invalid_argument);
}

TEST_CASE("stratified folds partition the data") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t k = 2 + static_cast<std::uint32_t>(gen::pick(rng, 9));
    const std::size_t n = 2 * k + gen::pick(rng, 200);
    std::vector<bool> labels(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) pos += labels[i] = i < k || (i >= 2 * k && gen::pick(rng, 3) == 0);
    const auto folds = stratified_folds(labels, k, trial);
    REQUIRE(folds.size() == n);
    std::vector<std::size_t> size(k), psize(k);
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(folds[i] < k);
      ++size[folds[i]];
      psize[folds[i]] += labels[i];
    }
    const auto [smin, smax] = std::minmax_element(size.begin(), size.end());
    CHECK(*smax - *smin <= 1);
    const auto [pmin, pmax] = std::minmax_element(psize.begin(), psize.end());
    CHECK(*pmax - *pmin <= 1);
    for (std::uint32_t f = 0; f < k; ++f) {
      const std::size_t neg = size[f] - psize[f];
      CHECK(neg >= (n - pos) / k);
      CHECK(neg <= (n - pos + k - 1) / k);
    }
    CHECK(stratified_folds(labels, k, trial) == folds);
  }
}

TEST_CASE("stratified folds errors") {
  std::vector<bool> labels(20, false);
  labels[0] = labels[1] = true;
  try {
    stratified_folds(labels, 3, 1);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("positive") != std::string::npos);
  }
  std::vector<bool> mostly_pos(20, true);
  mostly_pos[3] = false;
  try {
    stratified_folds(mostly_pos, 2, 1);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("negative") != std::string::npos);
  }
  CHECK_THROWS_AS(stratified_folds(labels, 1, 1), std::invalid_argument);
  // k equal to corpus size leaves singleton strata
  CHECK_THROWS_AS(stratified_folds(labels, static_cast<std::uint32_t>(labels.size()), 1), DataError);
}

namespace {

std::vector<TokenSeq> synthetic_docs(std::mt19937_64& rng, std::size_t n, std::vector<bool>& labels) {
  std::vector<TokenSeq> docs;
  labels.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const bool y = i % 3 == 0;
    TokenSeq d;
    for (std::size_t j = 2 + gen::pick(rng, 6); j > 0; --j) d.push_back(gen::word(rng, 10));
    if (y ? gen::pick(rng, 5) != 0 : gen::pick(rng, 8) == 0) d.push_back("signal");
    docs.push_back(d);
    labels.push_back(y);
  }
  return docs;
}

}  // namespace

TEST_CASE("cross validation") {
  std::mt19937_64 rng(8);
  std::vector<bool> labels;
  const auto docs = synthetic_docs(rng, 100, labels);
  for (Learner l : {Learner::nb, Learner::svm}) {
    CvOptions opts;
    const CvResult a = cross_validate(docs, labels, Track::stress, Task::relevance, l, opts);
    CHECK(a.pooled.total() == 100);
    CHECK(a.folds.size() == 10);
    for (const auto& f : a.folds) CHECK(f.total() == 10);
    ConfusionMatrix sum;
    for (const auto& f : a.folds) sum += f;
    CHECK(sum == a.pooled);
    CHECK(a.fold_of == stratified_folds(labels, 10, 42));
    // the planted signal is learnable
    CHECK(*a.metrics.accuracy > 0.75);

    opts.parallel = false;
    const CvResult b = cross_validate(docs, labels, Track::stress, Task::relevance, l, opts);
    CHECK(b.pooled == a.pooled);
    CHECK(b.folds == a.folds);

    opts.average = CvAverage::macro;
    const CvResult m = cross_validate(docs, labels, Track::stress, Task::relevance, l, opts);
    CHECK(m.pooled == a.pooled);
    double acc = 0;
    for (const auto& f : m.folds) acc += *metrics(f).accuracy;
    CHECK(*m.metrics.accuracy == doctest::Approx(acc / 10));
  }
  CHECK(fold_svm_seed(42, 0) == 43);
  CHECK(fold_svm_seed(42, 9) == 52);
}

TEST_CASE("information gain anchors") {
  const std::vector<TokenSeq> docs{{"p", "all"}, {"p", "all"}, {"all", "x"}, {"all"}};
  const std::vector<bool> labels{true, true, false, false};
  const Vocabulary v = build_vocabulary(docs);
  const auto ig = information_gain(docs, labels, v);
  REQUIRE(ig.size() == 3);
  CHECK(ig[0] == TermScore{"p", 1.0});
  // x and all tie-free: x appears once
  CHECK(ig[1].term == "x");
  CHECK(ig[2] == TermScore{"all", 0.0});
  CHECK_THROWS_AS(information_gain(docs, std::vector<bool>(4, true), v), DataError);
  CHECK(binary_entropy(1, 1) == 1.0);
  CHECK(binary_entropy(5, 0) == 0.0);
}

TEST_CASE("information gain matches the mutual information oracle") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + gen::pick(rng, 12);
    std::vector<TokenSeq> docs(n);
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = i == 0 ? true : i == 1 ? false : gen::pick(rng, 2) == 1;
      for (std::size_t j = 1 + gen::pick(rng, 5); j > 0; --j) docs[i].push_back(gen::word(rng, 6));
    }
    const Vocabulary v = build_vocabulary(docs);
    const auto ig = information_gain(docs, labels, v);
    REQUIRE(ig.size() == v.size());
    std::size_t pos = std::count(labels.begin(), labels.end(), true);
    const double h = binary_entropy(pos, n - pos);
    for (std::size_t r = 0; r < ig.size(); ++r) {
      std::vector<bool> present(n);
      for (std::size_t i = 0; i < n; ++i)
        present[i] = std::find(docs[i].begin(), docs[i].end(), ig[r].term) != docs[i].end();
      CHECK(std::abs(ig[r].gain - oracle::ig_mutual_information(present, labels)) <= 1e-10);
      CHECK(ig[r].gain >= 0.0);
      CHECK(ig[r].gain <= h);
      if (r) {
        CHECK(ig[r - 1].gain >= ig[r].gain);
        if (ig[r - 1].gain == ig[r].gain) CHECK(ig[r - 1].term < ig[r].term);
      }
    }
    // swapping classes and duplicating documents leave IG unchanged
    std::vector<bool> swapped(n);
    for (std::size_t i = 0; i < n; ++i) swapped[i] = !labels[i];
    const auto ig_swapped = information_gain(docs, swapped, v);
    std::vector<TokenSeq> dup = docs;
    dup.insert(dup.end(), docs.begin(), docs.end());
    std::vector<bool> dup_labels = labels;
    dup_labels.insert(dup_labels.end(), labels.begin(), labels.end());
    const auto ig_dup = information_gain(dup, dup_labels, v);
    std::map<std::string, double> base;
    for (const auto& s : ig) base[s.term] = s.gain;
    for (const auto& s : ig_swapped) CHECK(std::abs(base[s.term] - s.gain) <= 1e-12);
    for (const auto& s : ig_dup) CHECK(std::abs(base[s.term] - s.gain) <= 1e-12);
  }
}

TEST_CASE("top_terms layout") {
  std::vector<TermScore> scores;
  for (int i = 0; i < 100; ++i) scores.push_back({"t" + std::to_string(i), 0.5 / (i + 1)});
  const auto rows = top_terms(scores, 30);
  CHECK(rows.size() == 30);
  CHECK(rows[0] == "0.50000 t0");
  CHECK(rows[1] == "0.25000 t1");
  CHECK(top_terms(scores, 500).size() == 100);
  const std::vector<TermScore> one{{"stressed", 0.038354}};
  CHECK(top_terms(one, 30) == std::vector<std::string>{"0.03835 stressed"});
  CHECK_THROWS_AS(top_terms(one, 0), std::invalid_argument);
}

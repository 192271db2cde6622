#include "stresslens/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "random.hpp"
#include "stresslens/error.hpp"
#include "stresslens/report.hpp"

namespace stresslens {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("metrics: confusion matrix is all zero");
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.fp + cm.tn);
  r.ppv = ratio(cm.tp, cm.tp + cm.fp);
  return r;
}

ConfusionMatrix confusion(const std::vector<bool>& preds, const std::vector<bool>& gold) {
  if (preds.size() != gold.size())
    throw std::invalid_argument("confusion: " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(gold.size()) + " gold labels");
  if (preds.empty()) throw std::invalid_argument("confusion: no examples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i])
      ++(gold[i] ? cm.tp : cm.fp);
    else
      ++(gold[i] ? cm.fn : cm.tn);
  }
  return cm;
}

std::vector<std::uint32_t> stratified_folds(const std::vector<bool>& labels, std::uint32_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  for (auto [members, name] : {std::pair{&pos, "positive"}, std::pair{&neg, "negative"}})
    if (members->size() < k)
      throw DataError(std::string("class '") + name + "' has " + std::to_string(members->size()) +
                      " members, fewer than k = " + std::to_string(k));

  std::mt19937_64 rng(seed);
  detail::shuffle(std::span<std::size_t>(pos), rng);
  detail::shuffle(std::span<std::size_t>(neg), rng);

  std::vector<std::uint32_t> fold_of(labels.size());
  std::size_t slot = 0;
  for (const auto* members : {&pos, &neg})
    for (auto i : *members) fold_of[i] = static_cast<std::uint32_t>(slot++ % k);
  return fold_of;
}

std::uint64_t fold_svm_seed(std::uint64_t seed, std::uint32_t fold) noexcept { return seed + 1 + fold; }

CvResult cross_validate(std::span<const TokenSeq> docs, const std::vector<bool>& labels, Track track, Task task,
                        Learner learner, const CvOptions& opts) {
  if (docs.size() != labels.size()) throw std::invalid_argument("cross_validate: docs/labels length mismatch");
  CvResult result;
  result.fold_of = stratified_folds(labels, opts.k, opts.seed);

  auto run_fold = [&](std::uint32_t fold) {
    std::vector<TokenSeq> train_docs;
    std::vector<bool> train_labels;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (result.fold_of[i] == fold) {
        test.push_back(i);
      } else {
        train_docs.push_back(docs[i]);
        train_labels.push_back(labels[i]);
      }
    }
    TrainOptions train = opts.train;
    train.svm.seed = fold_svm_seed(opts.seed, fold);
    const auto model = train_model(train_docs, train_labels, track, task, learner, train);
    std::vector<bool> preds;
    std::vector<bool> gold;
    for (auto i : test) {
      preds.push_back(model.predict_tokens(docs[i]).label);
      gold.push_back(labels[i]);
    }
    return confusion(preds, gold);
  };

  result.folds.resize(opts.k);
  if (opts.parallel) {
    std::vector<std::future<ConfusionMatrix>> pending;
    for (std::uint32_t f = 0; f < opts.k; ++f) pending.push_back(std::async(std::launch::async, run_fold, f));
    for (std::uint32_t f = 0; f < opts.k; ++f) result.folds[f] = pending[f].get();
  } else {
    for (std::uint32_t f = 0; f < opts.k; ++f) result.folds[f] = run_fold(f);
  }
  for (const auto& cm : result.folds) result.pooled += cm;

  if (opts.average == CvAverage::pooled) {
    result.metrics = metrics(result.pooled);
  } else {
    std::array<double, 4> sum{};
    std::array<int, 4> n{};
    for (const auto& cm : result.folds) {
      const auto m = metrics(cm);
      const std::array<std::optional<double>, 4> vals{m.accuracy, m.sensitivity, m.specificity, m.ppv};
      for (int i = 0; i < 4; ++i)
        if (vals[i]) {
          sum[i] += *vals[i];
          ++n[i];
        }
    }
    auto mean = [&](int i) -> std::optional<double> {
      if (n[i] == 0) return std::nullopt;
      return sum[i] / n[i];
    };
    result.metrics = {mean(0), mean(1), mean(2), mean(3)};
  }
  return result;
}

CvResult cross_validate(const Corpus& c, Task task, Learner learner, const CvOptions& opts) {
  const auto labels = task_labels(c, task);
  std::vector<TokenSeq> docs;
  docs.reserve(c.records.size());
  for (const auto& rec : c.records) docs.push_back(tokenize(rec.text));
  return cross_validate(docs, labels, c.track, task, learner, opts);
}

double binary_entropy(std::uint64_t a, std::uint64_t b) noexcept {
  if (a == 0 || b == 0) return 0.0;
  const double n = static_cast<double>(a + b);
  const double p = static_cast<double>(a) / n;
  const double q = static_cast<double>(b) / n;
  return -(p * std::log2(p) + q * std::log2(q));
}

std::vector<TermScore> information_gain(std::span<const TokenSeq> docs, const std::vector<bool>& labels,
                                        const Vocabulary& v) {
  if (docs.size() != labels.size()) throw std::invalid_argument("information_gain: docs/labels length mismatch");
  const auto n_pos = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), true));
  const std::uint64_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("information_gain: corpus has a single class");

  std::vector<std::uint64_t> with_pos(v.size(), 0);
  std::vector<std::uint64_t> with_neg(v.size(), 0);
  std::unordered_set<TermId> present;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    present.clear();
    for (const auto& tok : docs[d]) {
      const auto id = v.find(tok);
      if (id >= 0) present.insert(static_cast<TermId>(id));
    }
    auto& bucket = labels[d] ? with_pos : with_neg;
    for (auto id : present) ++bucket[id];
  }

  const double n = static_cast<double>(docs.size());
  const double prior = binary_entropy(n_pos, n_neg);
  std::vector<TermScore> out;
  out.reserve(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::uint64_t a = with_pos[t];
    const std::uint64_t b = with_neg[t];
    const double p_present = static_cast<double>(a + b) / n;
    const double conditional =
        p_present * binary_entropy(a, b) + (1.0 - p_present) * binary_entropy(n_pos - a, n_neg - b);
    out.push_back({v.term(static_cast<TermId>(t)), std::clamp(prior - conditional, 0.0, prior)});
  }
  std::sort(out.begin(), out.end(), [](const TermScore& x, const TermScore& y) {
    if (x.gain != y.gain) return x.gain > y.gain;
    return x.term < y.term;
  });
  return out;
}

std::vector<TermScore> information_gain(const Corpus& c, Task task, const Vocabulary& v) {
  const auto labels = task_labels(c, task);
  std::vector<TokenSeq> docs;
  docs.reserve(c.records.size());
  for (const auto& rec : c.records) docs.push_back(tokenize(rec.text));
  return information_gain(docs, labels, v);
}

std::vector<std::string> top_terms(std::span<const TermScore> scores, std::size_t k) {
  if (k < 1) throw std::invalid_argument("top_terms: k must be >= 1");
  std::vector<std::string> rows;
  const auto n = std::min(k, scores.size());
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(format_fixed(scores[i].gain, 5) + ' ' + scores[i].term);
  return rows;
}

}  // namespace stresslens

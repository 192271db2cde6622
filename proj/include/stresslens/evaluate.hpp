#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stresslens/classify.hpp"
#include "stresslens/corpus.hpp"
#include "stresslens/tokenize.hpp"

namespace stresslens {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Each metric is nullopt exactly when its denominator is zero.
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;  // TP / (TP + FN)
  std::optional<double> specificity;  // TN / (FP + TN)
  std::optional<double> ppv;          // TP / (TP + FP)
};

/// Throws std::invalid_argument for an all-zero matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Throws std::invalid_argument on a length mismatch or empty input.
ConfusionMatrix confusion(const std::vector<bool>& preds, const std::vector<bool>& gold);

/// Fold index (0..k-1) of every example. Each class is shuffled with a
/// generator seeded by `seed` and dealt round-robin across folds; the
/// negative class continues where the positive class stopped, so fold sizes
/// differ by at most one overall and per class. Throws DataError naming a
/// class with fewer than k members, std::invalid_argument for k < 2.
std::vector<std::uint32_t> stratified_folds(const std::vector<bool>& labels, std::uint32_t k,
                                            std::uint64_t seed);

enum class CvAverage : std::uint8_t { pooled, macro };

struct CvOptions {
  std::uint32_t k = 10;
  std::uint64_t seed = 42;
  CvAverage average = CvAverage::pooled;
  TrainOptions train;
  bool parallel = true;
};

struct CvResult {
  ConfusionMatrix pooled;
  /// Metrics of the pooled matrix, or the mean of per-fold metrics (over
  /// folds where each is defined) when macro averaging was requested.
  MetricsReport metrics;
  std::vector<ConfusionMatrix> folds;
  std::vector<std::uint32_t> fold_of;  // per example
};

/// Seed of the SVM trained on fold `fold` in cross-validation.
std::uint64_t fold_svm_seed(std::uint64_t seed, std::uint32_t fold) noexcept;

/// Stratified k-fold cross-validation. The vocabulary is rebuilt from each
/// fold's training split.
CvResult cross_validate(std::span<const TokenSeq> docs, const std::vector<bool>& labels, Track track,
                        Task task, Learner learner, const CvOptions& opts = {});
CvResult cross_validate(const Corpus& c, Task task, Learner learner, const CvOptions& opts = {});

struct TermScore {
  std::string term;
  double gain = 0.0;  // bits

  friend bool operator==(const TermScore&, const TermScore&) = default;
};

/// Information gain of term presence about the class label, in bits, for
/// every vocabulary term. Sorted by gain descending, then by term. Throws
/// DataError when only one class is present.
std::vector<TermScore> information_gain(std::span<const TokenSeq> docs, const std::vector<bool>& labels,
                                        const Vocabulary& v);
std::vector<TermScore> information_gain(const Corpus& c, Task task, const Vocabulary& v);

/// Shannon entropy (bits) of a two-class split with the given counts.
double binary_entropy(std::uint64_t a, std::uint64_t b) noexcept;

/// "0.03835 stressed" rows for the first min(k, size) scores.
/// Throws std::invalid_argument for k < 1.
std::vector<std::string> top_terms(std::span<const TermScore> scores, std::size_t k);

}  // namespace stresslens

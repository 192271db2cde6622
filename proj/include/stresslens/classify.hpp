#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stresslens/corpus.hpp"
#include "stresslens/tokenize.hpp"

namespace stresslens {

/// Which gold label a classifier learns.
///   relevance: labels.relevant
///   firsthand: labels.relevant && labels.first_hand
enum class Task : std::uint8_t { relevance, firsthand };
enum class Learner : std::uint8_t { nb, svm };

std::string_view task_name(Task t) noexcept;
std::optional<Task> parse_task(std::string_view s) noexcept;
std::string_view learner_name(Learner l) noexcept;
std::optional<Learner> parse_learner(std::string_view s) noexcept;

/// Gold labels of every record for `task`. Throws DataError naming the first
/// record whose labels are missing.
std::vector<bool> task_labels(const Corpus& c, Task task);

struct Example {
  FeatureVector x;
  bool label = false;
};

/// label == (score > 0); an exact tie goes to the negative class.
struct Prediction {
  bool label = false;
  double score = 0.0;
};

inline Prediction make_prediction(double score) noexcept { return {score > 0.0, score}; }

// ---------------------------------------------------------------- naive Bayes

/// Multinomial naive Bayes. Index 0 is the negative class, 1 the positive.
struct NBModel {
  Vocabulary vocab;
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;
  double alpha = 1.0;
};

/// Throws std::invalid_argument for alpha <= 0 and DataError for an empty
/// or single-class training set.
NBModel train_nb(std::span<const Example> train, const Vocabulary& v, double alpha = 1.0);

/// Score is the log-posterior margin (positive minus negative class, nats).
/// Margins within rounding noise of zero (relative 1e-12 of the summed
/// magnitudes) are reported as exactly 0 so that exact ties resolve to the
/// negative class regardless of summation order.
Prediction nb_predict(const NBModel& m, const FeatureVector& x);

/// Per-class log joint scores, {negative, positive}.
std::array<double, 2> nb_class_scores(const NBModel& m, const FeatureVector& x);
/// Softmax of nb_class_scores.
std::array<double, 2> nb_posterior(const NBModel& m, const FeatureVector& x);

// ----------------------------------------------------------------- linear SVM

struct SvmConfig {
  double lambda = 1e-4;
  std::uint32_t epochs = 20;
  std::uint64_t seed = 42;
  bool project = true;
  bool binary = false;  // clip feature counts to 1 at train and predict time
};

struct SVMModel {
  Vocabulary vocab;
  std::vector<double> weights;
  double bias = 0.0;
  SvmConfig config;
};

/// Called after every Pegasos step with the current iterate (weights, bias).
using SvmStepObserver = std::function<void(std::span<const double>, double)>;

/// Pegasos stochastic subgradient descent on the L2-regularized hinge loss.
/// The bias is a constant-1 feature and is regularized with the weights.
/// Each epoch visits the training set in a freshly shuffled order drawn from
/// `cfg.seed`. The returned model is the average of the iterates over the
/// second half of training. Deterministic in (train order, cfg).
SVMModel train_svm(std::span<const Example> train, const Vocabulary& v, const SvmConfig& cfg = {},
                   const SvmStepObserver& observer = {});

Prediction svm_predict(const SVMModel& m, const FeatureVector& x);

// ------------------------------------------------------------ model container

struct TrainOptions {
  double nb_alpha = 1.0;
  SvmConfig svm;
  std::uint32_t min_df = 1;
};

/// A trained classifier plus the context it was trained for.
struct TrainedModel {
  Track track = Track::stress;
  Task task = Task::relevance;
  std::uint32_t min_df = 1;
  std::variant<NBModel, SVMModel> model;

  Learner learner() const noexcept {
    return std::holds_alternative<NBModel>(model) ? Learner::nb : Learner::svm;
  }
  const Vocabulary& vocab() const noexcept;

  Prediction predict(const FeatureVector& x) const;
  Prediction predict_tokens(std::span<const std::string> tokens) const;
  Prediction predict_text(std::string_view text) const;
};

/// Vectorizes every record of `c` against `v` and pairs it with its label.
std::vector<Example> make_examples(std::span<const TokenSeq> docs, const std::vector<bool>& labels,
                                   const Vocabulary& v);

/// Tokenizes, builds a vocabulary from the training corpus and trains.
TrainedModel train_model(const Corpus& c, Task task, Learner learner, const TrainOptions& opts = {});
TrainedModel train_model(std::span<const TokenSeq> docs, const std::vector<bool>& labels, Track track,
                         Task task, Learner learner, const TrainOptions& opts = {});

inline constexpr int kModelFormatVersion = 1;

/// One JSON container for both kinds: {format_version, kind: "nb"|"svm",
/// vocabulary, parameters, training_config}. Doubles are written in their
/// shortest round-trip form, so a reload predicts bit-identically.
std::string model_to_json(const TrainedModel& m);
/// Throws DataError for corrupt content or an unknown format_version / kind.
TrainedModel model_from_json(std::string_view json);
void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace stresslens

#include "stresslens/classify.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "random.hpp"
#include "stresslens/error.hpp"

namespace stresslens {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kTieTolerance = 1e-12;

void require_both_classes(std::span<const Example> train, const char* who) {
  if (train.empty()) throw DataError(std::string(who) + ": empty training set");
  const auto pos = std::count_if(train.begin(), train.end(), [](const Example& e) { return e.label; });
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(train.size()))
    throw DataError(std::string(who) + ": training set has a single class (" +
                    (pos == 0 ? "no positive" : "no negative") + " examples)");
}

}  // namespace

std::string_view task_name(Task t) noexcept { return t == Task::relevance ? "relevance" : "firsthand"; }

std::optional<Task> parse_task(std::string_view s) noexcept {
  if (s == "relevance") return Task::relevance;
  if (s == "firsthand") return Task::firsthand;
  return std::nullopt;
}

std::string_view learner_name(Learner l) noexcept { return l == Learner::nb ? "nb" : "svm"; }

std::optional<Learner> parse_learner(std::string_view s) noexcept {
  if (s == "nb") return Learner::nb;
  if (s == "svm") return Learner::svm;
  return std::nullopt;
}

std::vector<bool> task_labels(const Corpus& c, Task task) {
  std::vector<bool> out;
  out.reserve(c.records.size());
  for (const auto& rec : c.records) {
    if (!rec.labels || !rec.labels->relevant)
      throw DataError("record '" + rec.id + "' has no relevant label");
    const bool relevant = *rec.labels->relevant;
    if (task == Task::relevance) {
      out.push_back(relevant);
    } else if (!relevant) {
      out.push_back(false);
    } else {
      if (!rec.labels->first_hand) throw DataError("record '" + rec.id + "' has no first_hand label");
      out.push_back(*rec.labels->first_hand);
    }
  }
  return out;
}

// ---------------------------------------------------------------- naive Bayes

NBModel train_nb(std::span<const Example> train, const Vocabulary& v, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("train_nb: alpha must be > 0");
  require_both_classes(train, "train_nb");

  const std::size_t dim = v.size();
  std::array<std::vector<double>, 2> counts{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  std::array<double, 2> tokens{0.0, 0.0};
  std::array<double, 2> docs{0.0, 0.0};
  for (const auto& ex : train) {
    const int c = ex.label ? 1 : 0;
    docs[c] += 1.0;
    for (const auto& [id, n] : ex.x.entries) {
      if (id >= dim) continue;
      counts[c][id] += n;
      tokens[c] += n;
    }
  }

  NBModel m;
  m.vocab = v;
  m.alpha = alpha;
  const double n = docs[0] + docs[1];
  for (int c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(docs[c] / n);
    const double log_denominator = std::log(tokens[c] + alpha * static_cast<double>(dim));
    auto& ll = m.log_likelihood[c];
    ll.resize(dim);
    for (std::size_t t = 0; t < dim; ++t) ll[t] = std::log(counts[c][t] + alpha) - log_denominator;
  }
  return m;
}

std::array<double, 2> nb_class_scores(const NBModel& m, const FeatureVector& x) {
  std::array<double, 2> s = m.log_prior;
  const std::size_t dim = m.log_likelihood[0].size();
  for (const auto& [id, n] : x.entries) {
    if (id >= dim) continue;
    s[0] += n * m.log_likelihood[0][id];
    s[1] += n * m.log_likelihood[1][id];
  }
  return s;
}

std::array<double, 2> nb_posterior(const NBModel& m, const FeatureVector& x) {
  const auto s = nb_class_scores(m, x);
  const double hi = std::max(s[0], s[1]);
  const double e0 = std::exp(s[0] - hi);
  const double e1 = std::exp(s[1] - hi);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

Prediction nb_predict(const NBModel& m, const FeatureVector& x) {
  const auto s = nb_class_scores(m, x);
  double magnitude = std::abs(m.log_prior[0]) + std::abs(m.log_prior[1]);
  const std::size_t dim = m.log_likelihood[0].size();
  for (const auto& [id, n] : x.entries)
    if (id < dim) magnitude += n * (std::abs(m.log_likelihood[0][id]) + std::abs(m.log_likelihood[1][id]));
  double score = s[1] - s[0];
  if (std::abs(score) <= kTieTolerance * magnitude) score = 0.0;
  return make_prediction(score);
}

// ----------------------------------------------------------------- linear SVM

namespace {

// Pegasos state. The iterate is w = scale * v so that the shrink step
// (1 - 1/t) is O(1); v has one extra trailing slot for the bias feature.
// Averaging is lazy: avg_sum[j] accumulates v[j] times the summed scales of
// the steps during which v[j] held its current value.
class PegasosState {
 public:
  explicit PegasosState(std::size_t dim) : v_(dim + 1, 0.0), avg_sum_(dim + 1, 0.0), mark_(dim + 1, 0.0) {}

  std::size_t size() const noexcept { return v_.size(); }

  double dot(const FeatureVector& x) const {
    const std::size_t bias = v_.size() - 1;
    double s = v_[bias];
    for (const auto& [id, n] : x.entries)
      if (id < bias) s += v_[id] * n;
    return scale_ * s;
  }

  void shrink(double factor) {
    scale_ *= factor;
    if (scale_ < 1e-9) renormalize();
  }

  void add(const FeatureVector& x, double step) {
    const std::size_t bias = v_.size() - 1;
    const double delta = step / scale_;
    for (const auto& [id, n] : x.entries)
      if (id < bias) bump(id, delta * n);
    bump(bias, delta);
  }

  double norm() const noexcept { return scale_ * std::sqrt(std::max(norm2_, 0.0)); }

  void recompute_norm() {
    norm2_ = 0.0;
    for (double c : v_) norm2_ += c * c;
  }

  /// Marks the end of a step whose iterate joins the average.
  void accumulate() {
    averaging_ = true;
    cum_scale_ += scale_;
    ++averaged_steps_;
  }

  std::vector<double> materialize() const {
    std::vector<double> w(v_.size());
    for (std::size_t j = 0; j < v_.size(); ++j) w[j] = scale_ * v_[j];
    return w;
  }

  std::vector<double> average() {
    if (averaged_steps_ == 0) return materialize();
    flush_all();
    std::vector<double> w(v_.size());
    for (std::size_t j = 0; j < v_.size(); ++j) w[j] = avg_sum_[j] / static_cast<double>(averaged_steps_);
    return w;
  }

 private:
  void bump(std::size_t j, double d) {
    if (averaging_) {
      avg_sum_[j] += v_[j] * (cum_scale_ - mark_[j]);
      mark_[j] = cum_scale_;
    }
    const double old = v_[j];
    v_[j] = old + d;
    norm2_ += v_[j] * v_[j] - old * old;
  }

  void flush_all() {
    for (std::size_t j = 0; j < v_.size(); ++j) {
      avg_sum_[j] += v_[j] * (cum_scale_ - mark_[j]);
      mark_[j] = cum_scale_;
    }
  }

  void renormalize() {
    if (averaging_) flush_all();
    // After the flush every mark equals cum_scale_, so later steps only
    // contribute differences measured at the new scale.
    for (double& c : v_) c *= scale_;
    scale_ = 1.0;
    recompute_norm();
  }

  std::vector<double> v_;
  std::vector<double> avg_sum_;
  std::vector<double> mark_;
  double scale_ = 1.0;
  double norm2_ = 0.0;
  double cum_scale_ = 0.0;
  std::uint64_t averaged_steps_ = 0;
  bool averaging_ = false;
};

}  // namespace

SVMModel train_svm(std::span<const Example> train, const Vocabulary& v, const SvmConfig& cfg,
                   const SvmStepObserver& observer) {
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
    throw std::invalid_argument("train_svm: lambda must be > 0");
  if (cfg.epochs < 1) throw std::invalid_argument("train_svm: epochs must be >= 1");
  require_both_classes(train, "train_svm");

  std::vector<FeatureVector> xs;
  xs.reserve(train.size());
  for (const auto& ex : train) xs.push_back(cfg.binary ? binarize(ex.x) : ex.x);

  PegasosState state(v.size());
  const double radius = 1.0 / std::sqrt(cfg.lambda);
  const std::uint32_t first_averaged_epoch = cfg.epochs / 2;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  std::uint64_t t = 0;
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    detail::shuffle(std::span<std::size_t>(order), rng);
    state.recompute_norm();
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      const double y = train[i].label ? 1.0 : -1.0;
      const double margin = y * state.dot(xs[i]);
      if (t > 1) state.shrink(1.0 - 1.0 / static_cast<double>(t));
      if (margin < 1.0) state.add(xs[i], eta * y);
      if (cfg.project) {
        const double norm = state.norm();
        if (norm > radius) state.shrink(radius / norm);
      }
      if (epoch >= first_averaged_epoch) state.accumulate();
      if (observer) {
        const auto w = state.materialize();
        observer(std::span<const double>(w.data(), w.size() - 1), w.back());
      }
    }
  }

  auto w = state.average();
  SVMModel m;
  m.vocab = v;
  m.bias = w.back();
  w.pop_back();
  m.weights = std::move(w);
  m.config = cfg;
  return m;
}

Prediction svm_predict(const SVMModel& m, const FeatureVector& x) {
  double score = m.bias;
  for (const auto& [id, n] : x.entries)
    if (id < m.weights.size()) score += m.weights[id] * n;
  return make_prediction(score);
}

// ------------------------------------------------------------ model container

const Vocabulary& TrainedModel::vocab() const noexcept {
  return std::visit([](const auto& m) -> const Vocabulary& { return m.vocab; }, model);
}

Prediction TrainedModel::predict(const FeatureVector& x) const {
  if (const auto* nb = std::get_if<NBModel>(&model)) return nb_predict(*nb, x);
  const auto& svm = std::get<SVMModel>(model);
  return svm.config.binary ? svm_predict(svm, binarize(x)) : svm_predict(svm, x);
}

Prediction TrainedModel::predict_tokens(std::span<const std::string> tokens) const {
  return predict(vectorize(tokens, vocab()));
}

Prediction TrainedModel::predict_text(std::string_view text) const { return predict_tokens(tokenize(text)); }

std::vector<Example> make_examples(std::span<const TokenSeq> docs, const std::vector<bool>& labels,
                                   const Vocabulary& v) {
  if (docs.size() != labels.size()) throw std::invalid_argument("make_examples: docs/labels length mismatch");
  std::vector<Example> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({vectorize(docs[i], v), labels[i]});
  return out;
}

TrainedModel train_model(std::span<const TokenSeq> docs, const std::vector<bool>& labels, Track track, Task task,
                         Learner learner, const TrainOptions& opts) {
  TrainedModel out;
  out.track = track;
  out.task = task;
  out.min_df = opts.min_df;
  const auto vocab = build_vocabulary(docs, opts.min_df);
  const auto examples = make_examples(docs, labels, vocab);
  if (learner == Learner::nb)
    out.model = train_nb(examples, vocab, opts.nb_alpha);
  else
    out.model = train_svm(examples, vocab, opts.svm);
  return out;
}

TrainedModel train_model(const Corpus& c, Task task, Learner learner, const TrainOptions& opts) {
  const auto labels = task_labels(c, task);
  std::vector<TokenSeq> docs;
  docs.reserve(c.records.size());
  for (const auto& rec : c.records) docs.push_back(tokenize(rec.text));
  return train_model(docs, labels, c.track, task, learner, opts);
}

// ------------------------------------------------------------- serialization

std::string model_to_json(const TrainedModel& m) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = std::string(learner_name(m.learner()));
  const auto& v = m.vocab();
  j["vocabulary"] = {{"terms", v.terms()}, {"doc_freq", v.doc_freqs()}};

  ordered_json cfg;
  cfg["track"] = std::string(track_name(m.track));
  cfg["task"] = std::string(task_name(m.task));
  cfg["min_df"] = m.min_df;
  if (const auto* nb = std::get_if<NBModel>(&m.model)) {
    j["parameters"] = {{"log_prior", nb->log_prior}, {"log_likelihood", nb->log_likelihood}};
    cfg["alpha"] = nb->alpha;
  } else {
    const auto& svm = std::get<SVMModel>(m.model);
    j["parameters"] = {{"weights", svm.weights}, {"bias", svm.bias}};
    cfg["lambda"] = svm.config.lambda;
    cfg["epochs"] = svm.config.epochs;
    cfg["seed"] = svm.config.seed;
    cfg["project"] = svm.config.project;
    cfg["binary"] = svm.config.binary;
  }
  j["training_config"] = std::move(cfg);
  return j.dump(1);
}

namespace {

std::vector<double> finite_array(const ordered_json& j, std::size_t expected, const char* what) {
  auto out = j.get<std::vector<double>>();
  if (out.size() != expected)
    throw DataError(std::string("model: ") + what + " has " + std::to_string(out.size()) + " entries, expected " +
                    std::to_string(expected));
  for (double d : out)
    if (!std::isfinite(d)) throw DataError(std::string("model: non-finite value in ") + what);
  return out;
}

}  // namespace

TrainedModel model_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    if (!j.is_object()) throw DataError("model: not a JSON object");
    if (!j.contains("format_version")) throw DataError("model: missing format_version");
    const auto version = j.at("format_version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
      throw DataError("model: unsupported format_version " + version.dump());
    const auto kind = parse_learner(j.at("kind").get<std::string>());
    if (!kind) throw DataError("model: unknown kind " + j.at("kind").dump());

    const auto& cfg = j.at("training_config");
    TrainedModel m;
    const auto track = parse_track(cfg.at("track").get<std::string>());
    const auto task = parse_task(cfg.at("task").get<std::string>());
    if (!track || !task) throw DataError("model: bad track or task in training_config");
    m.track = *track;
    m.task = *task;
    m.min_df = cfg.at("min_df").get<std::uint32_t>();

    const auto& vj = j.at("vocabulary");
    Vocabulary vocab(vj.at("terms").get<std::vector<std::string>>(),
                     vj.at("doc_freq").get<std::vector<std::uint32_t>>());
    const auto& p = j.at("parameters");
    if (*kind == Learner::nb) {
      NBModel nb;
      const auto prior = finite_array(p.at("log_prior"), 2, "log_prior");
      nb.log_prior = {prior[0], prior[1]};
      const auto& ll = p.at("log_likelihood");
      if (!ll.is_array() || ll.size() != 2) throw DataError("model: log_likelihood must hold two classes");
      nb.log_likelihood[0] = finite_array(ll[0], vocab.size(), "log_likelihood");
      nb.log_likelihood[1] = finite_array(ll[1], vocab.size(), "log_likelihood");
      nb.alpha = cfg.at("alpha").get<double>();
      nb.vocab = std::move(vocab);
      m.model = std::move(nb);
    } else {
      SVMModel svm;
      svm.weights = finite_array(p.at("weights"), vocab.size(), "weights");
      svm.bias = finite_array(ordered_json::array({p.at("bias")}), 1, "bias")[0];
      svm.config.lambda = cfg.at("lambda").get<double>();
      svm.config.epochs = cfg.at("epochs").get<std::uint32_t>();
      svm.config.seed = cfg.at("seed").get<std::uint64_t>();
      svm.config.project = cfg.at("project").get<bool>();
      svm.config.binary = cfg.at("binary").get<bool>();
      svm.vocab = std::move(vocab);
      m.model = std::move(svm);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: corrupt file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << model_to_json(m) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return model_from_json(buf.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace stresslens

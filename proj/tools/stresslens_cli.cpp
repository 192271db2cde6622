// stresslens command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "stresslens/classify.hpp"
#include "stresslens/corpus.hpp"
#include "stresslens/error.hpp"
#include "stresslens/evaluate.hpp"
#include "stresslens/geo.hpp"
#include "stresslens/report.hpp"
#include "stresslens/themes.hpp"
#include "stresslens/tokenize.hpp"

namespace fs = std::filesystem;
using namespace stresslens;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct RunConfig {
  std::uint64_t seed = 42;
  std::string track = "stress";
  std::uint32_t k_folds = 10;
  double lambda = SvmConfig{}.lambda;
  std::uint32_t epochs = SvmConfig{}.epochs;
  bool no_project = false;
  bool binary = false;
  double alpha = 1.0;
  std::uint32_t min_df = 1;
  std::string yates = "off";
  std::string base = "total";
  fs::path output_dir = ".";

  Track parsed_track() const {
    auto t = parse_track(track);
    if (!t) throw std::invalid_argument("unknown track '" + track + "' (expected stress or relax)");
    return *t;
  }
  TrainOptions train_options() const {
    TrainOptions o;
    o.nb_alpha = alpha;
    o.min_df = min_df;
    o.svm.lambda = lambda;
    o.svm.epochs = epochs;
    o.svm.seed = seed;
    o.svm.project = !no_project;
    o.svm.binary = binary;
    return o;
  }
  bool use_yates() const { return yates == "on"; }
  ContrastBase contrast_base() const {
    return base == "keyword" ? ContrastBase::keyword_matched : ContrastBase::total_tweets;
  }
};

void write_text(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, std::string_view contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    write_text(path, contents);
  }
}

Task require_task(const std::string& s) {
  auto t = parse_task(s);
  if (!t) throw std::invalid_argument("unknown task '" + s + "' (expected relevance or firsthand)");
  return *t;
}

Learner require_learner(const std::string& s) {
  auto l = parse_learner(s);
  if (!l) throw std::invalid_argument("unknown model '" + s + "' (expected nb or svm)");
  return *l;
}

fs::path default_lexicon() { return fs::path(STRESSLENS_DEFAULT_LEXICON); }

// A file-system-safe stem for per-city outputs.
std::string city_stem(std::string_view city) {
  std::string out;
  for (char c : city) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? "city" : out;
}

// ------------------------------------------------------------------ ingest

int run_ingest(const RunConfig& cfg, const std::string& file, const std::string& out) {
  const Corpus c = load_corpus(file, cfg.parsed_track());
  std::size_t labeled = 0, relevant = 0, first_hand = 0, themed = 0;
  std::map<std::string, std::size_t> cities;
  for (const auto& r : c.records) {
    if (r.city) ++cities[*r.city];
    if (!r.labels) continue;
    if (r.labels->relevant) ++labeled;
    if (r.labels->relevant.value_or(false)) ++relevant;
    if (r.labels->first_hand.value_or(false)) ++first_hand;
    if (!r.labels->themes.empty()) ++themed;
  }
  std::cout << "track      " << track_name(c.track) << "\n"
            << "records    " << c.size() << "\n"
            << "labeled    " << labeled << "\n"
            << "relevant   " << relevant << "\n"
            << "first-hand " << first_hand << "\n"
            << "themed     " << themed << "\n";
  for (const auto& [city, n] : cities) std::cout << "city " << city << " " << n << "\n";
  if (!out.empty()) write_corpus(c, out);
  return 0;
}

// ------------------------------------------------------------------ filter

int run_filter(const RunConfig& cfg, const std::string& file, const std::string& keyword,
               const std::string& hashtags, const std::string& out) {
  if (keyword.empty() == hashtags.empty()) throw std::invalid_argument("filter needs exactly one of --keyword or --hashtags");
  const Corpus c = load_corpus(file, cfg.parsed_track());
  Corpus f;
  if (!keyword.empty()) {
    f = filter_keyword(c, keyword);
  } else if (hashtags == "table1" || hashtags == "seed") {
    f = filter_hashtags(c, seed_hashtags(c.track));
  } else {
    std::vector<std::string> tags;
    std::stringstream ss(hashtags);
    for (std::string t; std::getline(ss, t, ',');)
      if (!t.empty()) tags.push_back(t);
    f = filter_hashtags(c, tags);
  }
  emit(out, serialize_corpus(f));
  std::cerr << "kept " << f.size() << " of " << c.size() << " records\n";
  return 0;
}

// ------------------------------------------------------------------- train

int run_train(const RunConfig& cfg, const std::string& file, const std::string& model, const std::string& task,
              const std::string& out) {
  const Corpus c = load_corpus(file, cfg.parsed_track());
  const TrainedModel m = train_model(c, require_task(task), require_learner(model), cfg.train_options());
  save_model(m, out);
  std::cerr << "trained " << learner_name(m.learner()) << " (" << task_name(m.task) << ") on " << c.size()
            << " records, " << m.vocab().size() << " terms\n";
  return 0;
}

// ---------------------------------------------------------------------- cv

int run_cv(const RunConfig& cfg, const std::string& file, const std::string& model, const std::string& task,
           bool macro, bool sequential) {
  const Corpus c = load_corpus(file, cfg.parsed_track());
  CvOptions opts;
  opts.k = cfg.k_folds;
  opts.seed = cfg.seed;
  opts.average = macro ? CvAverage::macro : CvAverage::pooled;
  opts.train = cfg.train_options();
  opts.parallel = !sequential;
  CvReport r;
  r.track = c.track;
  r.task = require_task(task);
  r.learner = require_learner(model);
  r.k = opts.k;
  r.seed = opts.seed;
  r.average = opts.average;
  r.examples = c.size();
  r.result = cross_validate(c, r.task, r.learner, opts);

  const std::string stem = "cv_" + std::string(task_name(r.task)) + "_" + std::string(learner_name(r.learner));
  const std::string text = cv_report_text(r);
  write_text(cfg.output_dir / (stem + ".txt"), text);
  write_text(cfg.output_dir / (stem + ".json"), cv_report_json(r));
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------- classify

int run_classify(const RunConfig& cfg, const std::string& file, const std::string& relevance,
                 const std::string& firsthand, const std::string& out) {
  const Corpus c = load_corpus(file, cfg.parsed_track());
  const TrainedModel rel = load_model(relevance);
  const TrainedModel fh = load_model(firsthand);
  if (rel.task != Task::relevance) throw DataError(relevance + ": not a relevance model");
  if (fh.task != Task::firsthand) throw DataError(firsthand + ": not a firsthand model");
  if (rel.track != c.track || fh.track != c.track) throw DataError("model track does not match the corpus track");
  std::string lines;
  std::size_t n_rel = 0, n_fh = 0;
  for (const auto& r : c.records) {
    const TokenSeq tokens = tokenize(r.text);
    const Prediction pr = rel.predict_tokens(tokens);
    const Prediction pf = fh.predict_tokens(tokens);
    const bool first = pr.label && pf.label;
    n_rel += pr.label;
    n_fh += first;
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["relevant"] = pr.label;
    j["first_hand"] = first;
    j["relevance_score"] = pr.score;
    j["firsthand_score"] = pf.score;
    lines += j.dump() + '\n';
  }
  emit(out, lines);
  std::cerr << "relevant " << n_rel << ", first-hand " << n_fh << " of " << c.size() << " records\n";
  return 0;
}

// ------------------------------------------------------------------ themes

int run_themes(const RunConfig& cfg, const std::string& file, const std::string& lexicon,
               std::uint64_t denominator) {
  const Corpus c = load_corpus(file, cfg.parsed_track());
  const ThemeLexicon lex = load_lexicon(lexicon.empty() ? default_lexicon() : fs::path(lexicon));
  std::vector<ThemeAssignment> as;
  as.reserve(c.size());
  for (const auto& r : c.records) as.push_back(classify_themes(r, lex, c.track));
  const std::uint64_t denom = denominator ? denominator : c.size();
  const auto rows = theme_distribution(as, c.track, denom);
  write_text(cfg.output_dir / "themes.assignments.jsonl", theme_assignments_jsonl(as));
  const std::string text = theme_distribution_text(rows);
  write_text(cfg.output_dir / "themes.distribution.txt", text);
  write_text(cfg.output_dir / "themes.distribution.json", theme_distribution_json(rows, denom));
  std::cout << text;
  return 0;
}

// -------------------------------------------------------------- rank-terms

int run_rank_terms(const RunConfig& cfg, const std::string& file, const std::string& task, std::size_t top) {
  const Corpus c = load_corpus(file, cfg.parsed_track());
  const Task t = require_task(task);
  const Vocabulary v = build_vocabulary(c, cfg.min_df);
  const auto scores = information_gain(c, t, v);
  const std::string title = "Top " + std::to_string(std::min(top, scores.size())) + " terms by information gain (" +
                            std::string(track_name(c.track)) + ", " + std::string(task_name(t)) + ")";
  const std::string text = rank_terms_text(scores, top, title);
  write_text(cfg.output_dir / "rank_terms.txt", text);
  write_text(cfg.output_dir / "rank_terms.json", rank_terms_json(scores, top));
  std::cout << text;
  return 0;
}

// ----------------------------------------------------------------- compare

struct CityOutput {
  CityReport report;
  std::string first_hand_corpus;
};

int run_compare(const RunConfig& cfg, const std::vector<std::string>& manifests, const std::string& relevance,
                const std::string& firsthand, const std::string& lexicon, std::size_t top) {
  if (manifests.size() < 2) throw std::invalid_argument("compare needs at least two manifests");
  const Track track = cfg.parsed_track();
  std::vector<CityManifest> ms;
  bool need_models = false;
  for (const auto& p : manifests) {
    ms.push_back(load_manifest(p));
    need_models |= !ms.back().counts.has_value();
  }
  std::optional<TrainedModel> rel, fh;
  std::optional<ThemeLexicon> lex;
  if (need_models) {
    if (relevance.empty() || firsthand.empty())
      throw std::invalid_argument("manifests with a corpus_path need --relevance and --firsthand models");
    rel = load_model(relevance);
    fh = load_model(firsthand);
    lex = load_lexicon(lexicon.empty() ? default_lexicon() : fs::path(lexicon));
  }

  std::vector<std::future<CityOutput>> jobs;
  for (const auto& m : ms) {
    jobs.push_back(std::async(std::launch::async, [&, m] {
      if (m.counts) {
        CityReport r = make_city_report(m.city, track, *m.total_tweets, m.counts->keyword_matched, m.counts->relevant,
                                        m.counts->first_hand);
        return CityOutput{std::move(r), {}};
      }
      Corpus c = load_corpus(*m.corpus_path, track);
      PipelineOptions opts;
      opts.total_tweets = m.total_tweets;
      opts.top_k = top;
      PipelineResult res = run_city_pipeline(m.city, c, *rel, *fh, *lex, opts);
      return CityOutput{std::move(res.report), serialize_corpus(res.first_hand)};
    }));
  }
  std::vector<CityOutput> outputs;
  for (auto& j : jobs) outputs.push_back(j.get());

  std::vector<CityReport> reports;
  for (const auto& o : outputs) {
    reports.push_back(o.report);
    write_text(cfg.output_dir / (city_stem(o.report.city) + ".report.json"),
               city_report_json(o.report, o.first_hand_corpus));
    if (!o.first_hand_corpus.empty())
      write_text(cfg.output_dir / (city_stem(o.report.city) + ".firsthand.jsonl"), o.first_hand_corpus);
  }
  const PairwiseMatrix pm = pairwise_compare(reports, cfg.use_yates(), cfg.contrast_base());
  const std::string table = city_table_text(reports);
  const std::string matrix = pvalue_matrix_text(pm);
  write_text(cfg.output_dir / "cities.txt", table);
  write_text(cfg.output_dir / "pvalues.txt", matrix);
  write_text(cfg.output_dir / "pvalues.json", pvalue_matrix_json(pm, cfg.use_yates(), cfg.contrast_base()));
  if (need_models) write_text(cfg.output_dir / "themes.txt", city_theme_counts_text(reports));
  std::cout << table << "\n" << matrix;
  return 0;
}

// ------------------------------------------------------------------ report

int run_report(const RunConfig& cfg, const std::vector<std::string>& inputs, bool tagcloud, bool drop_track_term,
               std::size_t top) {
  std::vector<CityReport> reports;
  if (tagcloud) fs::create_directories(cfg.output_dir);
  for (const auto& p : inputs) {
    CityReportFile f = city_report_from_json(read_text(p));
    if (!f.first_hand_corpus.empty()) {
      const Corpus fhc = parse_corpus(f.first_hand_corpus, f.report.track, p);
      f.report.top_keywords = top_keywords(fhc, top);
      if (tagcloud)
        tagcloud_export(fhc, cfg.output_dir / (city_stem(f.report.city) + ".tagcloud.tsv"), drop_track_term);
    } else if (tagcloud) {
      std::cerr << "note: " << p << " holds no first-hand corpus; no tag cloud written\n";
    }
    reports.push_back(std::move(f.report));
  }
  const std::string keywords = keyword_table_text(reports);
  write_text(cfg.output_dir / "keywords.txt", keywords);
  write_text(cfg.output_dir / "cities.txt", city_table_text(reports));
  std::cout << keywords;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stresslens: stress and relaxation tweet analysis"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Global seed (STRESSLENS_SEED overrides)")->capture_default_str();
  app.add_option("--track", cfg.track, "stress or relax")->capture_default_str();
  app.fallthrough();

  std::string file, out, model = "svm", task = "relevance", keyword, hashtags, relevance, firsthand, lexicon;
  std::vector<std::string> inputs;
  bool macro = false, sequential = false, tagcloud = false, drop_track_term = false;
  std::size_t top = 30;
  std::uint64_t denominator = 0;

  const auto add_learning = [&](CLI::App* sub) {
    sub->add_option("--model", model, "nb or svm")->capture_default_str();
    sub->add_option("--task", task, "relevance or firsthand")->capture_default_str();
    sub->add_option("--lambda", cfg.lambda, "SVM regularization")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--epochs", cfg.epochs, "SVM epochs")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--no-project", cfg.no_project, "Disable the Pegasos norm-ball projection");
    sub->add_flag("--binary", cfg.binary, "Clip SVM feature counts to 1");
    sub->add_option("--alpha", cfg.alpha, "Naive Bayes smoothing")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--min-df", cfg.min_df, "Minimum document frequency")->capture_default_str()->check(CLI::PositiveNumber);
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print summary counts");
  ingest->add_option("file", file)->required();
  ingest->add_option("--write", out, "Write the validated corpus here");

  auto* filter = app.add_subcommand("filter", "Keep records matching a keyword or hashtag set");
  filter->add_option("corpus", file)->required();
  filter->add_option("--keyword", keyword);
  filter->add_option("--hashtags", hashtags, "'table1' for the built-in seed set, or comma-separated tags");
  filter->add_option("--out", out, "Output corpus (stdout by default)");

  auto* train = app.add_subcommand("train", "Train a classifier and save it as JSON");
  train->add_option("corpus", file)->required();
  add_learning(train);
  train->add_option("-o,--out", out, "Model file")->required();

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  cv->add_option("corpus", file)->required();
  add_learning(cv);
  cv->add_option("--k", cfg.k_folds, "Number of folds")->capture_default_str()->check(CLI::Range(2u, 1000000u));
  cv->add_flag("--macro", macro, "Average per-fold metrics instead of pooling");
  cv->add_flag("--sequential", sequential, "Run folds one at a time");
  cv->add_option("-o,--output-dir", cfg.output_dir)->capture_default_str();

  auto* classify = app.add_subcommand("classify", "Label records with relevance and first-hand models");
  classify->add_option("corpus", file)->required();
  classify->add_option("--relevance", relevance)->required();
  classify->add_option("--firsthand", firsthand)->required();
  classify->add_option("--out", out, "Output JSON-Lines (stdout by default)");

  auto* themes = app.add_subcommand("themes", "Assign lexicon themes and tabulate them");
  themes->add_option("corpus", file)->required();
  themes->add_option("--lexicon", lexicon, "Lexicon JSON (the shipped lexicon by default)");
  themes->add_option("--denominator", denominator, "Proportion denominator (corpus size by default)");
  themes->add_option("-o,--output-dir", cfg.output_dir)->capture_default_str();

  auto* rank = app.add_subcommand("rank-terms", "Rank terms by information gain");
  rank->add_option("corpus", file)->required();
  rank->add_option("--task", task)->capture_default_str();
  rank->add_option("--top", top)->capture_default_str()->check(CLI::PositiveNumber);
  rank->add_option("--min-df", cfg.min_df)->capture_default_str()->check(CLI::PositiveNumber);
  rank->add_option("-o,--output-dir", cfg.output_dir)->capture_default_str();

  auto* compare = app.add_subcommand("compare", "City reports and pairwise chi-squared tests");
  compare->add_option("manifests", inputs)->required();
  compare->add_option("--relevance", relevance);
  compare->add_option("--firsthand", firsthand);
  compare->add_option("--lexicon", lexicon);
  compare->add_option("--yates", cfg.yates, "on or off")->capture_default_str()->check(CLI::IsMember({"on", "off"}));
  compare->add_option("--base", cfg.base, "Second margin: total or keyword")
      ->capture_default_str()
      ->check(CLI::IsMember({"total", "keyword"}));
  compare->add_option("--top", top)->capture_default_str()->check(CLI::PositiveNumber);
  compare->add_option("-o,--output-dir", cfg.output_dir)->capture_default_str();

  auto* report = app.add_subcommand("report", "Keyword tables and tag clouds from compare outputs");
  report->add_option("reports", inputs, "<city>.report.json files")->required();
  report->add_flag("--tagcloud", tagcloud, "Write <city>.tagcloud.tsv");
  report->add_flag("--drop-track-term", drop_track_term, "Leave the track keyword out of tag clouds");
  report->add_option("--top", top)->capture_default_str()->check(CLI::PositiveNumber);
  report->add_option("-o,--output-dir", cfg.output_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (const char* env = std::getenv("STRESSLENS_SEED"); env && *env) {
      const std::string s(env);
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.front() == '-') throw std::invalid_argument("STRESSLENS_SEED is not an unsigned integer: " + s);
      cfg.seed = v;
    }

    if (*ingest) return run_ingest(cfg, file, out);
    if (*filter) return run_filter(cfg, file, keyword, hashtags, out);
    if (*train) return run_train(cfg, file, model, task, out);
    if (*cv) return run_cv(cfg, file, model, task, macro, sequential);
    if (*classify) return run_classify(cfg, file, relevance, firsthand, out);
    if (*themes) return run_themes(cfg, file, lexicon, denominator);
    if (*rank) return run_rank_terms(cfg, file, task, top);
    if (*compare) return run_compare(cfg, inputs, relevance, firsthand, lexicon, top);
    if (*report) return run_report(cfg, inputs, tagcloud, drop_track_term, top);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

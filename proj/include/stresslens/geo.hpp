#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stresslens/classify.hpp"
#include "stresslens/corpus.hpp"
#include "stresslens/themes.hpp"
#include "stresslens/tokenize.hpp"

namespace stresslens {

struct KeywordRow {
  std::string term;
  std::uint64_t count = 0;
  double percent = 0.0;  // 0..100, share of all tokens
};

struct CityReport {
  std::string city;
  Track track = Track::stress;
  std::uint64_t total_tweets = 0;
  std::uint64_t keyword_matched = 0;
  std::uint64_t relevant = 0;
  std::uint64_t first_hand = 0;
  double proportion_relevant = 0.0;
  double proportion_first_hand = 0.0;
  std::vector<ThemeRow> theme_table;  // proportions over first_hand
  std::vector<KeywordRow> top_keywords;
};

/// Builds a report from cascade counts and fills both proportions (0 when
/// total is 0). Throws DataError unless
/// total >= keyword_matched >= relevant >= first_hand.
CityReport make_city_report(std::string city, Track track, std::uint64_t total_tweets,
                            std::uint64_t keyword_matched, std::uint64_t relevant,
                            std::uint64_t first_hand);

/// Decides one cascade step for a record given its tokens.
using RecordPredicate = std::function<bool(const TweetRecord&, std::span<const std::string>)>;

struct PipelineOptions {
  /// Denominator of the proportions; defaults to the corpus size. Lets a
  /// corpus that holds only keyword-matched tweets report against the full
  /// stream total.
  std::optional<std::uint64_t> total_tweets;
  std::size_t top_k = 30;
};

struct PipelineResult {
  CityReport report;
  Corpus first_hand;  // records surviving all three steps
  std::vector<ThemeAssignment> assignments;
};

/// Keyword filter on the track keyword, then `is_relevant`, then
/// `is_first_hand`; survivors get themes and keyword counts.
PipelineResult run_cascade(std::string city, const Corpus& c, const RecordPredicate& is_relevant,
                           const RecordPredicate& is_first_hand, const ThemeLexicon& lex,
                           const PipelineOptions& opts = {});

/// run_cascade with trained classifiers. Throws DataError when a model was
/// trained for another track or task, or has an empty vocabulary.
PipelineResult run_city_pipeline(std::string city, const Corpus& c, const TrainedModel& relevance,
                                 const TrainedModel& firsthand, const ThemeLexicon& lex,
                                 const PipelineOptions& opts = {});

struct TestResult {
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  bool yates = false;
};

/// Survival function of the chi-squared distribution with one degree of
/// freedom: erfc(sqrt(x / 2)).
double chi2_sf_df1(double x) noexcept;

/// Pearson chi-squared test on [[a_pos, a_total - a_pos], [b_pos, b_total - b_pos]]
/// with margin-product expectations. Yates' correction shrinks each |O - E|
/// by 0.5 (floored at 0). Throws DataError for a zero total, pos > total,
/// or any zero expected cell.
TestResult chi2_two_proportions(std::uint64_t a_pos, std::uint64_t a_total, std::uint64_t b_pos,
                                std::uint64_t b_total, bool yates = false);

/// Which count forms the second margin of each city's row.
enum class ContrastBase : std::uint8_t { total_tweets, keyword_matched };

struct PairwiseMatrix {
  std::vector<std::string> cities;
  /// cells[i][j] is the test between city i and j; the diagonal is empty.
  std::vector<std::vector<std::optional<TestResult>>> cells;
};

/// Throws std::invalid_argument for fewer than two reports.
PairwiseMatrix pairwise_compare(std::span<const CityReport> reports, bool yates = false,
                                ContrastBase base = ContrastBase::total_tweets);

/// Most frequent unigrams, descending by count then term. Throws DataError
/// for an empty corpus and std::invalid_argument for k < 1.
std::vector<KeywordRow> top_keywords(std::span<const TokenSeq> docs, std::size_t k = 30);
std::vector<KeywordRow> top_keywords(const Corpus& c, std::size_t k = 30);

/// Relative token frequencies, descending by weight then term, summing to 1.
/// `drop_term`, when given, is removed before normalizing.
std::vector<std::pair<std::string, double>> tagcloud_weights(std::span<const TokenSeq> docs,
                                                             std::optional<std::string_view> drop_term = {});

/// Writes "term<TAB>weight" lines. Throws DataError for an empty corpus or
/// an I/O failure.
void tagcloud_export(const Corpus& c, const std::filesystem::path& path, bool drop_track_term = false);

/// City input: {"city", "total_tweets", "corpus_path"}. A manifest may carry
/// "counts": {"keyword_matched", "relevant", "first_hand"} instead of a
/// corpus, for reports built from published tallies.
struct CityManifest {
  std::string city;
  std::optional<std::uint64_t> total_tweets;
  std::optional<std::filesystem::path> corpus_path;  // resolved against the manifest's directory
  struct Counts {
    std::uint64_t keyword_matched = 0;
    std::uint64_t relevant = 0;
    std::uint64_t first_hand = 0;
  };
  std::optional<Counts> counts;
};

CityManifest parse_manifest(std::string_view json, const std::filesystem::path& base_dir = {});
CityManifest load_manifest(const std::filesystem::path& path);

}  // namespace stresslens

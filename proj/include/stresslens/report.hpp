#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "stresslens/evaluate.hpp"
#include "stresslens/geo.hpp"
#include "stresslens/themes.hpp"

// Human (aligned text) and machine (JSON) renderings of every report. Both
// forms of a report are produced from the same values.
namespace stresslens {

/// Fixed-point decimal with round-half-away-from-zero (0.90625 -> "0.91" at
/// two places, not the banker's "0.90").
std::string format_fixed(double x, int decimals);

/// Value in [0,1] as a percentage with two decimals ("76.71"), or "NA".
std::string format_percent(std::optional<double> x);

/// "75.00/76.71/70.37/87.50" in Acc/Sen/Spec/PPV order.
std::string format_metrics(const MetricsReport& m);

/// 8229442 -> "8,229,442".
std::string format_count(std::uint64_t n);

/// "P<0.0001" below 1e-4, otherwise six decimals.
std::string format_p_value(double p);

/// Forbes 2011 / CNN 2014 survey stress rank, e.g. "2 (1)" for New York.
/// Matches city names case-insensitively, ignoring spaces and underscores.
std::optional<std::string> survey_rank(std::string_view city);

struct CvReport {
  Track track = Track::stress;
  Task task = Task::relevance;
  Learner learner = Learner::svm;
  std::uint32_t k = 10;
  std::uint64_t seed = 42;
  CvAverage average = CvAverage::pooled;
  std::size_t examples = 0;
  CvResult result;
};

std::string cv_report_text(const CvReport& r);
std::string cv_report_json(const CvReport& r);

std::string rank_terms_text(std::span<const TermScore> scores, std::size_t k, std::string_view title);
std::string rank_terms_json(std::span<const TermScore> scores, std::size_t k);

std::string theme_distribution_text(std::span<const ThemeRow> rows);
std::string theme_distribution_json(std::span<const ThemeRow> rows, std::uint64_t denominator);
std::string theme_assignments_jsonl(std::span<const ThemeAssignment> assignments);

/// Per-city cascade counts and proportions.
std::string city_table_text(std::span<const CityReport> reports);
/// Theme counts, one column per city.
std::string city_theme_counts_text(std::span<const CityReport> reports);
/// Symmetric p-value matrix with NA on the diagonal.
std::string pvalue_matrix_text(const PairwiseMatrix& m);
std::string pvalue_matrix_json(const PairwiseMatrix& m, bool yates, ContrastBase base);

/// Top keywords side by side, "term count percent" per city.
std::string keyword_table_text(std::span<const CityReport> reports);

std::string city_report_json(const CityReport& r, std::string_view first_hand_corpus = {});
struct CityReportFile {
  CityReport report;
  std::string first_hand_corpus;  // as written; may be empty
};
CityReportFile city_report_from_json(std::string_view json);

}  // namespace stresslens

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stresslens/corpus.hpp"
#include "stresslens/taxonomy.hpp"
#include "stresslens/tokenize.hpp"

namespace stresslens {

struct ThemeTerms {
  std::vector<std::string> unigrams;
  std::vector<std::string> bigrams;  // "w1 w2"
};

/// Per-theme keyword lists for both tracks, already in tokenizer-normal
/// form. Lookups are indexed by term for matching.
class ThemeLexicon {
 public:
  ThemeLexicon();

  const ThemeTerms& terms(ThemeId theme) const;
  /// Adds a term to a theme. Terms are normalized; a unigram must normalize
  /// to one token and a bigram to two. Throws DataError otherwise, and for
  /// any term added to a non_specific theme.
  void add_unigram(ThemeId theme, std::string_view term);
  void add_bigram(ThemeId theme, std::string_view term);

  /// Themes of `track` that list `term` among their unigrams / bigrams.
  std::span<const ThemeId> unigram_themes(Track track, std::string_view term) const;
  std::span<const ThemeId> bigram_themes(Track track, std::string_view term) const;

  std::size_t term_count(Track track) const;

 private:
  using Index = std::map<std::string, std::vector<ThemeId>, std::less<>>;
  struct TrackData {
    std::vector<ThemeTerms> themes;
    Index unigram_index;
    Index bigram_index;
  };
  void add(ThemeId theme, std::string_view term, bool bigram);

  std::array<TrackData, 2> tracks_;
};

/// Reads {track: {theme_name: {unigrams: [...], bigrams: [...]}}}.
/// Throws DataError for unknown tracks/themes or malformed terms.
ThemeLexicon parse_lexicon(std::string_view json);
ThemeLexicon load_lexicon(const std::filesystem::path& path);
std::string lexicon_to_json(const ThemeLexicon& lex);

struct ThemeAssignment {
  std::string record_id;
  std::vector<ThemeId> themes;  // nonempty, schema order
  /// Terms that fired, per theme (parallel to `themes`); bigrams first.
  std::vector<std::vector<std::string>> matched_terms;

  bool has(ThemeId t) const noexcept;
};

/// Multi-label keyword matching: bigrams first, then unigrams. A record
/// with no hits gets exactly {non_specific}.
ThemeAssignment classify_themes(const TweetRecord& rec, const ThemeLexicon& lex, Track track);
ThemeAssignment classify_themes(std::string_view id, std::span<const std::string> tokens,
                                const ThemeLexicon& lex, Track track);

struct ThemeRow {
  ThemeId theme;
  std::uint64_t count = 0;
  double proportion = 0.0;
};

/// One row per theme of `track` in schema order: how many assignments carry
/// the theme, over `denominator`. Proportions may sum past 1.
/// Throws std::invalid_argument when denominator is 0 or smaller than the
/// number of assignments.
std::vector<ThemeRow> theme_distribution(std::span<const ThemeAssignment> assignments, Track track,
                                         std::uint64_t denominator);

}  // namespace stresslens

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stresslens/taxonomy.hpp"

namespace stresslens {

/// Gold annotations. `first_hand` nests under `relevant == true`, and
/// themes nest under `first_hand == true`.
struct LabelSet {
  std::optional<bool> relevant;
  std::optional<bool> first_hand;
  std::vector<ThemeId> themes;  // sorted, unique

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

struct TweetRecord {
  std::string id;
  std::string text;
  std::optional<std::string> created_at;  // RFC 3339, stored verbatim
  std::optional<std::string> city;
  std::optional<LabelSet> labels;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

struct Corpus {
  std::vector<TweetRecord> records;
  Track track = Track::stress;
  std::string provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }

  /// Provenance is metadata and does not take part in equality.
  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.track == b.track && a.records == b.records;
  }
};

/// Validates one record against the corpus schema for `track`. Throws
/// DataError with a message naming the offending field.
void validate_record(const TweetRecord& rec, Track track);

/// Parses one JSON-Lines record. Throws DataError ("missing field text",
/// "invalid JSON: ...") without position information.
TweetRecord parse_record(std::string_view json_line, Track track);
std::string serialize_record(const TweetRecord& rec);

/// Reads a JSON-Lines corpus. Blank lines are skipped. Errors carry the
/// 1-based line number ("line 2: missing field text").
Corpus load_corpus(const std::filesystem::path& path, Track track);
Corpus parse_corpus(std::string_view contents, Track track, std::string provenance = {});
void write_corpus(const Corpus& c, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& c);

/// Case-insensitive substring filter on normalized text. Stable.
Corpus filter_keyword(const Corpus& c, std::string_view keyword);

/// Keeps records containing at least one tag as a whole hashtag: the match
/// may not be preceded or followed by a letter, digit, or underscore.
Corpus filter_hashtags(const Corpus& c, std::span<const std::string> tags);

/// The hashtag search list used to seed the annotated dataset.
std::span<const std::string> seed_hashtags(Track track);

/// True when `normalized_text` contains `normalized_tag` at a hashtag
/// boundary. Both arguments must already be normalize_lower'ed.
bool contains_hashtag(std::string_view normalized_text, std::string_view normalized_tag);

}  // namespace stresslens

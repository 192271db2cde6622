#include "stresslens/themes.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stresslens/error.hpp"

namespace stresslens {

namespace {

std::size_t track_slot(Track t) { return t == Track::stress ? 0 : 1; }

}  // namespace

ThemeLexicon::ThemeLexicon() {
  for (Track t : {Track::stress, Track::relaxation}) tracks_[track_slot(t)].themes.resize(ThemeId::all(t).size());
}

const ThemeTerms& ThemeLexicon::terms(ThemeId theme) const {
  return tracks_[track_slot(theme.track())].themes.at(theme.index());
}

void ThemeLexicon::add_unigram(ThemeId theme, std::string_view term) { add(theme, term, false); }

void ThemeLexicon::add_bigram(ThemeId theme, std::string_view term) { add(theme, term, true); }

void ThemeLexicon::add(ThemeId theme, std::string_view term, bool bigram) {
  const std::string where = std::string(track_name(theme.track())) + "." + std::string(theme.name());
  if (theme.is_non_specific()) throw DataError(where + ": non_specific is assigned by fallback and takes no terms");
  const auto tokens = tokenize(term);
  const std::size_t want = bigram ? 2 : 1;
  if (tokens.size() != want)
    throw DataError(where + ": " + (bigram ? "bigram" : "unigram") + " '" + std::string(term) + "' has " +
                    std::to_string(tokens.size()) + " tokens, expected " + std::to_string(want));
  std::string normalized = join_tokens(tokens);

  auto& data = tracks_[track_slot(theme.track())];
  auto& list = bigram ? data.themes[theme.index()].bigrams : data.themes[theme.index()].unigrams;
  if (std::find(list.begin(), list.end(), normalized) != list.end()) return;
  list.push_back(normalized);
  auto& owners = (bigram ? data.bigram_index : data.unigram_index)[std::move(normalized)];
  owners.insert(std::upper_bound(owners.begin(), owners.end(), theme), theme);
}

std::span<const ThemeId> ThemeLexicon::unigram_themes(Track track, std::string_view term) const {
  const auto& idx = tracks_[track_slot(track)].unigram_index;
  auto it = idx.find(term);
  if (it == idx.end()) return {};
  return it->second;
}

std::span<const ThemeId> ThemeLexicon::bigram_themes(Track track, std::string_view term) const {
  const auto& idx = tracks_[track_slot(track)].bigram_index;
  auto it = idx.find(term);
  if (it == idx.end()) return {};
  return it->second;
}

std::size_t ThemeLexicon::term_count(Track track) const {
  std::size_t n = 0;
  for (const auto& t : tracks_[track_slot(track)].themes) n += t.unigrams.size() + t.bigrams.size();
  return n;
}

ThemeLexicon parse_lexicon(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("lexicon: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("lexicon: top level must be an object keyed by track");

  ThemeLexicon lex;
  for (const auto& [track_key, themes] : j.items()) {
    const auto track = parse_track(track_key);
    if (!track || track_key == "relax") throw DataError("lexicon: unknown track '" + track_key + "'");
    if (!themes.is_object()) throw DataError("lexicon: track '" + track_key + "' must map theme names to term lists");
    for (const auto& [theme_key, lists] : themes.items()) {
      const auto theme = ThemeId::parse(*track, theme_key);
      if (!theme) throw DataError("lexicon: unknown " + track_key + " theme '" + theme_key + "'");
      if (!lists.is_object()) throw DataError("lexicon: " + theme_key + " must be an object");
      for (const auto& [kind, terms] : lists.items()) {
        if (kind != "unigrams" && kind != "bigrams")
          throw DataError("lexicon: " + theme_key + ": unexpected key '" + kind + "'");
        if (!terms.is_array()) throw DataError("lexicon: " + theme_key + "." + kind + " must be an array");
        for (const auto& term : terms) {
          if (!term.is_string()) throw DataError("lexicon: " + theme_key + "." + kind + " entries must be strings");
          if (kind == "unigrams")
            lex.add_unigram(*theme, term.get<std::string>());
          else
            lex.add_bigram(*theme, term.get<std::string>());
        }
      }
    }
  }
  return lex;
}

ThemeLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_lexicon(buf.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string lexicon_to_json(const ThemeLexicon& lex) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (Track t : {Track::stress, Track::relaxation}) {
    nlohmann::ordered_json themes = nlohmann::ordered_json::object();
    for (ThemeId id : ThemeId::all(t)) {
      if (id.is_non_specific()) continue;
      const auto& terms = lex.terms(id);
      themes[std::string(id.name())] = {{"unigrams", terms.unigrams}, {"bigrams", terms.bigrams}};
    }
    j[std::string(track_name(t))] = std::move(themes);
  }
  return j.dump(2);
}

bool ThemeAssignment::has(ThemeId t) const noexcept {
  return std::find(themes.begin(), themes.end(), t) != themes.end();
}

ThemeAssignment classify_themes(std::string_view id, std::span<const std::string> tokens, const ThemeLexicon& lex,
                                Track track) {
  const auto all = ThemeId::all(track);
  std::vector<std::vector<std::string>> hits(all.size());
  auto record = [&](std::span<const ThemeId> owners, const std::string& term) {
    for (ThemeId theme : owners) {
      auto& list = hits[theme.index()];
      if (std::find(list.begin(), list.end(), term) == list.end()) list.push_back(term);
    }
  };
  for (const auto& bigram : ngrams(tokens, 2)) record(lex.bigram_themes(track, bigram), bigram);
  for (const auto& unigram : tokens) record(lex.unigram_themes(track, unigram), unigram);

  ThemeAssignment out;
  out.record_id = std::string(id);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (hits[i].empty()) continue;
    out.themes.push_back(all[i]);
    out.matched_terms.push_back(std::move(hits[i]));
  }
  if (out.themes.empty()) {
    out.themes.push_back(ThemeId::non_specific(track));
    out.matched_terms.emplace_back();
  }
  return out;
}

ThemeAssignment classify_themes(const TweetRecord& rec, const ThemeLexicon& lex, Track track) {
  return classify_themes(rec.id, tokenize(rec.text), lex, track);
}

std::vector<ThemeRow> theme_distribution(std::span<const ThemeAssignment> assignments, Track track,
                                         std::uint64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("theme_distribution: denominator must be > 0");
  if (denominator < assignments.size())
    throw std::invalid_argument("theme_distribution: denominator " + std::to_string(denominator) +
                                " is smaller than the " + std::to_string(assignments.size()) + " assignments");
  const auto all = ThemeId::all(track);
  std::vector<ThemeRow> rows;
  rows.reserve(all.size());
  for (ThemeId theme : all) rows.push_back({theme, 0, 0.0});
  for (const auto& a : assignments)
    for (ThemeId theme : a.themes)
      if (theme.track() == track) ++rows[theme.index()].count;
  for (auto& row : rows) row.proportion = static_cast<double>(row.count) / static_cast<double>(denominator);
  return rows;
}

}  // namespace stresslens

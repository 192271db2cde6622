#include "stresslens/corpus.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "stresslens/error.hpp"
#include "stresslens/text.hpp"

namespace stresslens {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxTextChars = 2000;

const std::regex& rfc3339() {
  static const std::regex re(
      R"(^\d{4}-\d{2}-\d{2}[Tt ]\d{2}:\d{2}:\d{2}(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$)");
  return re;
}

const ordered_json* field(const ordered_json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string required_string(const ordered_json& obj, const char* name) {
  const auto* f = field(obj, name);
  if (f == nullptr) throw DataError(std::string("missing field ") + name);
  if (!f->is_string()) throw DataError(std::string("field ") + name + " must be a string");
  return f->get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* name) {
  const auto* f = field(obj, name);
  if (f == nullptr) return std::nullopt;
  if (!f->is_string()) throw DataError(std::string("field ") + name + " must be a string");
  return f->get<std::string>();
}

std::optional<bool> optional_bool(const ordered_json& obj, const char* name) {
  const auto* f = field(obj, name);
  if (f == nullptr) return std::nullopt;
  if (!f->is_boolean()) throw DataError(std::string("field labels.") + name + " must be a boolean");
  return f->get<bool>();
}

LabelSet parse_labels(const ordered_json& j, Track track) {
  if (!j.is_object()) throw DataError("field labels must be an object");
  LabelSet labels;
  labels.relevant = optional_bool(j, "relevant");
  labels.first_hand = optional_bool(j, "first_hand");
  if (const auto* themes = field(j, "themes")) {
    if (!themes->is_array()) throw DataError("field labels.themes must be an array");
    for (const auto& t : *themes) {
      if (!t.is_string()) throw DataError("labels.themes entries must be strings");
      const auto name = t.get<std::string>();
      auto id = ThemeId::parse(track, name);
      if (!id)
        throw DataError("unknown " + std::string(track_name(track)) + " theme '" + name + "'");
      labels.themes.push_back(*id);
    }
    std::sort(labels.themes.begin(), labels.themes.end());
    labels.themes.erase(std::unique(labels.themes.begin(), labels.themes.end()), labels.themes.end());
  }
  return labels;
}

bool is_word_char(UChar32 c) {
  if (c == '_') return true;
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_L_MASK | U_GC_M_MASK | U_GC_ND_MASK)) != 0;
}

UChar32 code_point_before(std::string_view s, std::size_t pos) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  auto i = static_cast<std::int32_t>(pos);
  UChar32 c;
  U8_PREV(p, 0, i, c);
  return c;
}

UChar32 code_point_at(std::string_view s, std::size_t pos) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  auto i = static_cast<std::int32_t>(pos);
  UChar32 c;
  U8_NEXT(p, i, static_cast<std::int32_t>(s.size()), c);
  return c;
}

}  // namespace

void validate_record(const TweetRecord& rec, Track track) {
  if (rec.id.empty()) throw DataError("empty id");
  if (!text::is_valid_utf8(rec.text)) throw DataError("text is not valid UTF-8");
  if (text::is_blank(rec.text)) throw DataError("text is empty");
  if (text::code_point_count(rec.text) > kMaxTextChars)
    throw DataError("text longer than " + std::to_string(kMaxTextChars) + " characters");
  if (rec.created_at && !std::regex_match(*rec.created_at, rfc3339()))
    throw DataError("created_at is not an RFC 3339 timestamp: '" + *rec.created_at + "'");
  if (rec.city && rec.city->empty()) throw DataError("empty city");
  if (rec.labels) {
    const LabelSet& l = *rec.labels;
    if (l.first_hand && l.relevant != std::optional<bool>(true))
      throw DataError("labels.first_hand requires labels.relevant == true");
    if (!l.themes.empty() && l.first_hand != std::optional<bool>(true))
      throw DataError("labels.themes requires labels.first_hand == true");
    for (const auto& t : l.themes)
      if (t.track() != track) throw DataError("theme '" + std::string(t.name()) + "' belongs to another track");
  }
}

TweetRecord parse_record(std::string_view json_line, Track track) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");

  TweetRecord rec;
  rec.id = required_string(j, "id");
  rec.text = required_string(j, "text");
  rec.created_at = optional_string(j, "created_at");
  rec.city = optional_string(j, "city");
  if (const auto* labels = field(j, "labels")) rec.labels = parse_labels(*labels, track);
  validate_record(rec, track);
  return rec;
}

std::string serialize_record(const TweetRecord& rec) {
  ordered_json j;
  j["id"] = rec.id;
  j["text"] = rec.text;
  if (rec.created_at) j["created_at"] = *rec.created_at;
  if (rec.city) j["city"] = *rec.city;
  if (rec.labels) {
    ordered_json l = ordered_json::object();
    if (rec.labels->relevant) l["relevant"] = *rec.labels->relevant;
    if (rec.labels->first_hand) l["first_hand"] = *rec.labels->first_hand;
    if (!rec.labels->themes.empty()) {
      ordered_json themes = ordered_json::array();
      for (const auto& t : rec.labels->themes) themes.push_back(std::string(t.name()));
      l["themes"] = std::move(themes);
    }
    j["labels"] = std::move(l);
  }
  return j.dump();
}

Corpus parse_corpus(std::string_view contents, Track track, std::string provenance) {
  Corpus c;
  c.track = track;
  c.provenance = std::move(provenance);
  std::unordered_map<std::string, std::size_t> seen;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    auto line = contents.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::is_ascii(line) && text::is_blank(line)) continue;

    TweetRecord rec;
    try {
      rec = parse_record(line, track);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, inserted] = seen.emplace(rec.id, line_no);
    if (!inserted)
      throw DataError("line " + std::to_string(line_no) + ": duplicate id '" + rec.id +
                      "' (first seen on line " + std::to_string(it->second) + ")");
    c.records.push_back(std::move(rec));
  }
  if (c.records.empty()) throw DataError("corpus is empty");
  return c;
}

Corpus load_corpus(const std::filesystem::path& path, Track track) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_corpus(buf.str(), track, "load_corpus(" + path.string() + ")");
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_corpus(const Corpus& c) {
  std::string out;
  for (const auto& rec : c.records) {
    out += serialize_record(rec);
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  out << serialize_corpus(c);
  if (!out) throw DataError("write failed: " + path.string());
}

Corpus filter_keyword(const Corpus& c, std::string_view keyword) {
  const std::string key = text::normalize_lower(keyword);
  if (key.empty()) throw std::invalid_argument("filter keyword must be nonempty");
  Corpus out;
  out.track = c.track;
  out.provenance = c.provenance + (c.provenance.empty() ? "" : " | ") + "filter_keyword(" + key + ")";
  for (const auto& rec : c.records)
    if (text::normalize_lower(rec.text).find(key) != std::string::npos) out.records.push_back(rec);
  return out;
}

bool contains_hashtag(std::string_view normalized_text, std::string_view normalized_tag) {
  if (normalized_tag.empty()) return false;
  for (auto pos = normalized_text.find(normalized_tag); pos != std::string_view::npos;
       pos = normalized_text.find(normalized_tag, pos + 1)) {
    const auto end = pos + normalized_tag.size();
    const bool left_ok = pos == 0 || !is_word_char(code_point_before(normalized_text, pos));
    const bool right_ok = end == normalized_text.size() || !is_word_char(code_point_at(normalized_text, end));
    if (left_ok && right_ok) return true;
  }
  return false;
}

Corpus filter_hashtags(const Corpus& c, std::span<const std::string> tags) {
  if (tags.empty()) throw std::invalid_argument("hashtag filter needs at least one tag");
  std::vector<std::string> normalized;
  std::string history;
  for (const auto& t : tags) {
    if (t.size() < 2 || t.front() != '#')
      throw std::invalid_argument("hashtag '" + t + "' must start with '#' and name a tag");
    normalized.push_back(text::normalize_lower(t));
    history += (history.empty() ? "" : ",") + normalized.back();
  }
  Corpus out;
  out.track = c.track;
  out.provenance = c.provenance + (c.provenance.empty() ? "" : " | ") + "filter_hashtags(" + history + ")";
  for (const auto& rec : c.records) {
    const auto norm = text::normalize_lower(rec.text);
    for (const auto& tag : normalized) {
      if (contains_hashtag(norm, tag)) {
        out.records.push_back(rec);
        break;
      }
    }
  }
  return out;
}

std::span<const std::string> seed_hashtags(Track track) {
  static const std::vector<std::string> stress = {
      "#stress",      "#stressed",   "#stressful",    "#stressin",     "#stressing",
      "#sostressful", "#sostressed", "#stressinout", "#stressingout",
  };
  static const std::vector<std::string> relax = {
      "#relaxed", "#relaxin", "#relaxing", "#sorelaxin", "#sorelaxing",
  };
  return track == Track::stress ? std::span<const std::string>(stress) : std::span<const std::string>(relax);
}

}  // namespace stresslens

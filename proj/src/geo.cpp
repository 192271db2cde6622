#include "stresslens/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "stresslens/error.hpp"

namespace stresslens {

CityReport make_city_report(std::string city, Track track, std::uint64_t total_tweets, std::uint64_t keyword_matched,
                            std::uint64_t relevant, std::uint64_t first_hand) {
  if (!(total_tweets >= keyword_matched && keyword_matched >= relevant && relevant >= first_hand))
    throw DataError("city '" + city + "': counts must narrow: total " + std::to_string(total_tweets) +
                    " >= keyword " + std::to_string(keyword_matched) + " >= relevant " + std::to_string(relevant) +
                    " >= first-hand " + std::to_string(first_hand));
  CityReport r;
  r.city = std::move(city);
  r.track = track;
  r.total_tweets = total_tweets;
  r.keyword_matched = keyword_matched;
  r.relevant = relevant;
  r.first_hand = first_hand;
  if (total_tweets > 0) {
    const auto total = static_cast<double>(total_tweets);
    r.proportion_relevant = static_cast<double>(relevant) / total;
    r.proportion_first_hand = static_cast<double>(first_hand) / total;
  }
  for (ThemeId theme : ThemeId::all(track)) r.theme_table.push_back({theme, 0, 0.0});
  return r;
}

PipelineResult run_cascade(std::string city, const Corpus& c, const RecordPredicate& is_relevant,
                           const RecordPredicate& is_first_hand, const ThemeLexicon& lex,
                           const PipelineOptions& opts) {
  const Corpus matched = filter_keyword(c, track_keyword(c.track));

  PipelineResult out;
  out.first_hand.track = c.track;
  out.first_hand.provenance = matched.provenance + " | relevance | first-hand";
  std::vector<TokenSeq> survivor_tokens;
  std::uint64_t relevant = 0;
  for (const auto& rec : matched.records) {
    auto tokens = tokenize(rec.text);
    if (!is_relevant(rec, tokens)) continue;
    ++relevant;
    if (!is_first_hand(rec, tokens)) continue;
    out.assignments.push_back(classify_themes(rec.id, tokens, lex, c.track));
    out.first_hand.records.push_back(rec);
    survivor_tokens.push_back(std::move(tokens));
  }

  const std::uint64_t total = opts.total_tweets.value_or(c.records.size());
  out.report = make_city_report(std::move(city), c.track, total, matched.records.size(), relevant,
                                out.first_hand.records.size());
  if (!out.assignments.empty()) {
    out.report.theme_table = theme_distribution(out.assignments, c.track, out.assignments.size());
    out.report.top_keywords = top_keywords(survivor_tokens, opts.top_k);
  }
  return out;
}

PipelineResult run_city_pipeline(std::string city, const Corpus& c, const TrainedModel& relevance,
                                 const TrainedModel& firsthand, const ThemeLexicon& lex, const PipelineOptions& opts) {
  auto check = [&](const TrainedModel& m, Task want, const char* role) {
    if (m.vocab().empty()) throw DataError(std::string(role) + " model is untrained (empty vocabulary)");
    if (m.task != want)
      throw DataError(std::string(role) + " model was trained for the " + std::string(task_name(m.task)) + " task");
    if (m.track != c.track)
      throw DataError(std::string(role) + " model was trained on the " + std::string(track_name(m.track)) +
                      " track, corpus is " + std::string(track_name(c.track)));
  };
  check(relevance, Task::relevance, "relevance");
  check(firsthand, Task::firsthand, "first-hand");
  const RecordPredicate rel = [&](const TweetRecord&, std::span<const std::string> tokens) {
    return relevance.predict_tokens(tokens).label;
  };
  const RecordPredicate fh = [&](const TweetRecord&, std::span<const std::string> tokens) {
    return firsthand.predict_tokens(tokens).label;
  };
  return run_cascade(std::move(city), c, rel, fh, lex, opts);
}

double chi2_sf_df1(double x) noexcept {
  if (!(x > 0.0)) return 1.0;
  return std::clamp(std::erfc(std::sqrt(x / 2.0)), 0.0, 1.0);
}

TestResult chi2_two_proportions(std::uint64_t a_pos, std::uint64_t a_total, std::uint64_t b_pos,
                                std::uint64_t b_total, bool yates) {
  if (a_total == 0 || b_total == 0) throw DataError("chi-squared: group totals must be > 0");
  if (a_pos > a_total || b_pos > b_total) throw DataError("chi-squared: positives exceed group total");

  const double observed[2][2] = {{static_cast<double>(a_pos), static_cast<double>(a_total - a_pos)},
                                 {static_cast<double>(b_pos), static_cast<double>(b_total - b_pos)}};
  const double rows[2] = {static_cast<double>(a_total), static_cast<double>(b_total)};
  const double cols[2] = {observed[0][0] + observed[1][0], observed[0][1] + observed[1][1]};
  const double n = rows[0] + rows[1];

  TestResult r;
  r.yates = yates;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expected = rows[i] * cols[j] / n;
      if (expected == 0.0) throw DataError("chi-squared: a column of the 2x2 table is empty (expected count 0)");
      double diff = std::abs(observed[i][j] - expected);
      if (yates) diff = std::max(0.0, diff - 0.5);
      r.statistic += diff * diff / expected;
    }
  }
  r.p_value = chi2_sf_df1(r.statistic);
  return r;
}

PairwiseMatrix pairwise_compare(std::span<const CityReport> reports, bool yates, ContrastBase base) {
  if (reports.size() < 2) throw std::invalid_argument("pairwise_compare needs at least two cities");
  PairwiseMatrix m;
  const auto n = reports.size();
  m.cells.assign(n, std::vector<std::optional<TestResult>>(n));
  for (const auto& r : reports) m.cities.push_back(r.city);
  auto margin = [base](const CityReport& r) {
    return base == ContrastBase::total_tweets ? r.total_tweets : r.keyword_matched;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto t = chi2_two_proportions(reports[i].first_hand, margin(reports[i]), reports[j].first_hand,
                                          margin(reports[j]), yates);
      m.cells[i][j] = t;
      m.cells[j][i] = t;
    }
  }
  return m;
}

namespace {

std::vector<std::pair<std::string, std::uint64_t>> ranked_counts(std::span<const TokenSeq> docs,
                                                                 std::optional<std::string_view> drop,
                                                                 std::uint64_t& total) {
  std::unordered_map<std::string_view, std::uint64_t> counts;
  total = 0;
  for (const auto& doc : docs) {
    for (const auto& tok : doc) {
      if (drop && tok == *drop) continue;
      ++counts[tok];
      ++total;
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [term, n] : counts) ranked.emplace_back(std::string(term), n);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

std::vector<TokenSeq> tokenize_all(const Corpus& c) {
  std::vector<TokenSeq> docs;
  docs.reserve(c.records.size());
  for (const auto& rec : c.records) docs.push_back(tokenize(rec.text));
  return docs;
}

}  // namespace

std::vector<KeywordRow> top_keywords(std::span<const TokenSeq> docs, std::size_t k) {
  if (k < 1) throw std::invalid_argument("top_keywords: k must be >= 1");
  if (docs.empty()) throw DataError("top_keywords: empty corpus");
  std::uint64_t total = 0;
  auto ranked = ranked_counts(docs, std::nullopt, total);
  std::vector<KeywordRow> rows;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i)
    rows.push_back({std::move(ranked[i].first), ranked[i].second,
                    100.0 * static_cast<double>(ranked[i].second) / static_cast<double>(total)});
  return rows;
}

std::vector<KeywordRow> top_keywords(const Corpus& c, std::size_t k) {
  if (c.empty()) throw DataError("top_keywords: empty corpus");
  return top_keywords(tokenize_all(c), k);
}

std::vector<std::pair<std::string, double>> tagcloud_weights(std::span<const TokenSeq> docs,
                                                             std::optional<std::string_view> drop_term) {
  std::uint64_t total = 0;
  auto ranked = ranked_counts(docs, drop_term, total);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(ranked.size());
  for (auto& [term, n] : ranked)
    out.emplace_back(std::move(term), static_cast<double>(n) / static_cast<double>(total));
  return out;
}

void tagcloud_export(const Corpus& c, const std::filesystem::path& path, bool drop_track_term) {
  if (c.empty()) throw DataError("tag cloud: empty corpus");
  std::optional<std::string_view> drop;
  if (drop_track_term) drop = track_keyword(c.track);
  const auto weights = tagcloud_weights(tokenize_all(c), drop);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write tag cloud " + path.string());
  char buf[64];
  for (const auto& [term, w] : weights) {
    auto res = std::to_chars(buf, buf + sizeof buf, w);
    out << term << '\t' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

CityManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("manifest: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("manifest: expected a JSON object");
  CityManifest m;
  try {
    if (!j.contains("city") || !j["city"].is_string() || j["city"].get<std::string>().empty())
      throw DataError("manifest: missing field city");
    m.city = j["city"].get<std::string>();
    if (j.contains("total_tweets")) {
      if (!j["total_tweets"].is_number_unsigned()) throw DataError("manifest: total_tweets must be a non-negative integer");
      m.total_tweets = j["total_tweets"].get<std::uint64_t>();
    }
    if (j.contains("corpus_path")) {
      std::filesystem::path p = j["corpus_path"].get<std::string>();
      m.corpus_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    if (j.contains("counts")) {
      const auto& c = j["counts"];
      m.counts = CityManifest::Counts{c.at("keyword_matched").get<std::uint64_t>(), c.at("relevant").get<std::uint64_t>(),
                                      c.at("first_hand").get<std::uint64_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  if (!m.corpus_path && !m.counts) throw DataError("manifest '" + m.city + "': needs corpus_path or counts");
  if (m.counts && !m.total_tweets) throw DataError("manifest '" + m.city + "': counts require total_tweets");
  return m;
}

CityManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_manifest(buf.str(), path.parent_path());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace stresslens

#include "stresslens/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "stresslens/error.hpp"
#include "stresslens/text.hpp"

namespace stresslens {

namespace {

using ordered_json = nlohmann::ordered_json;

// Column-aligned rendering; the first column is left-aligned, the rest
// right-aligned unless `left` says otherwise.
class Table {
 public:
  explicit Table(std::size_t columns, std::vector<bool> left = {}) : left_(std::move(left)) {
    left_.resize(columns, false);
    if (!left_.empty() && !left_[0]) left_[0] = true;
  }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    std::vector<std::size_t> width(left_.size(), 0);
    for (const auto& row : rows_)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], text::code_point_count(row[c]));
    std::string out;
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string pad(width[c] - text::code_point_count(row[c]), ' ');
        if (c > 0) line += "  ";
        line += left_[c] ? row[c] + pad : pad + row[c];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line;
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<bool> left_;
  std::vector<std::vector<std::string>> rows_;
};

ordered_json percent_json(std::optional<double> x) {
  if (!x) return nullptr;
  return std::round(*x * 10000.0) / 100.0;
}

std::string lower_compact(std::string_view city) {
  std::string out;
  for (char c : text::normalize_lower(city))
    if (c != ' ' && c != '_' && c != '-') out += c;
  return out;
}

}  // namespace

std::string format_fixed(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double rounded = std::round(x * scale) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded == 0.0 ? 0.0 : rounded);
  return buf;
}

std::string format_percent(std::optional<double> x) { return x ? format_fixed(*x * 100.0, 2) : "NA"; }

std::string format_metrics(const MetricsReport& m) {
  return format_percent(m.accuracy) + "/" + format_percent(m.sensitivity) + "/" + format_percent(m.specificity) +
         "/" + format_percent(m.ppv);
}

std::string format_count(std::uint64_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string format_p_value(double p) { return p < 1e-4 ? "P<0.0001" : format_fixed(p, 6); }

std::optional<std::string> survey_rank(std::string_view city) {
  const auto key = lower_compact(city);
  if (key == "losangeles") return "1 (3)";
  if (key == "newyork") return "2 (1)";
  if (key == "sandiego") return "5 (38)";
  if (key == "sanfrancisco") return "7 (39)";
  return std::nullopt;
}

// -------------------------------------------------------------- evaluation

std::string cv_report_text(const CvReport& r) {
  std::ostringstream out;
  const auto& cm = r.result.pooled;
  out << "Cross-validation: " << task_name(r.task) << " (" << track_name(r.track) << "), learner "
      << learner_name(r.learner) << "\n";
  out << "folds " << r.k << " stratified, seed " << r.seed << ", "
      << (r.average == CvAverage::pooled ? "pooled" : "macro-averaged") << " metrics, " << r.examples
      << " examples\n\n";
  Table t(3);
  t.add({"", "predicted +", "predicted -"});
  t.add({"gold +", "TP " + std::to_string(cm.tp), "FN " + std::to_string(cm.fn)});
  t.add({"gold -", "FP " + std::to_string(cm.fp), "TN " + std::to_string(cm.tn)});
  out << t.render() << "\n";
  Table m(2);
  m.add({"Acc/Sen/Spec/PPV", format_metrics(r.result.metrics)});
  m.add({"Accuracy", format_percent(r.result.metrics.accuracy)});
  m.add({"Sensitivity", format_percent(r.result.metrics.sensitivity)});
  m.add({"Specificity", format_percent(r.result.metrics.specificity)});
  m.add({"PPV", format_percent(r.result.metrics.ppv)});
  out << m.render();
  return out.str();
}

std::string cv_report_json(const CvReport& r) {
  ordered_json j;
  j["task"] = std::string(task_name(r.task));
  j["track"] = std::string(track_name(r.track));
  j["learner"] = std::string(learner_name(r.learner));
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["average"] = r.average == CvAverage::pooled ? "pooled" : "macro";
  j["examples"] = r.examples;
  const auto& cm = r.result.pooled;
  j["cells"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
  j["accuracy"] = percent_json(r.result.metrics.accuracy);
  j["sensitivity"] = percent_json(r.result.metrics.sensitivity);
  j["specificity"] = percent_json(r.result.metrics.specificity);
  j["ppv"] = percent_json(r.result.metrics.ppv);
  j["acc_sen_spec_ppv"] = format_metrics(r.result.metrics);
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.result.folds) folds.push_back({{"tp", f.tp}, {"fp", f.fp}, {"fn", f.fn}, {"tn", f.tn}});
  j["folds"] = std::move(folds);
  return j.dump(2) + "\n";
}

std::string rank_terms_text(std::span<const TermScore> scores, std::size_t k, std::string_view title) {
  std::string out(title);
  out += '\n';
  for (const auto& row : top_terms(scores, k)) out += row + '\n';
  return out;
}

std::string rank_terms_json(std::span<const TermScore> scores, std::size_t k) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < std::min(k, scores.size()); ++i)
    rows.push_back({{"term", scores[i].term}, {"gain", std::stod(format_fixed(scores[i].gain, 5))}});
  return rows.dump(2) + "\n";
}

// ------------------------------------------------------------------ themes

std::string theme_distribution_text(std::span<const ThemeRow> rows) {
  Table t(3);
  t.add({"theme", "count", "proportion"});
  for (const auto& r : rows) t.add({std::string(r.theme.name()), std::to_string(r.count), format_fixed(r.proportion, 4)});
  return t.render();
}

std::string theme_distribution_json(std::span<const ThemeRow> rows, std::uint64_t denominator) {
  ordered_json j;
  j["denominator"] = denominator;
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows)
    arr.push_back({{"theme", std::string(r.theme.name())}, {"count", r.count}, {"proportion", r.proportion}});
  j["themes"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string theme_assignments_jsonl(std::span<const ThemeAssignment> assignments) {
  std::string out;
  for (const auto& a : assignments) {
    ordered_json j;
    j["id"] = a.record_id;
    ordered_json themes = ordered_json::array();
    ordered_json matched = ordered_json::object();
    for (std::size_t i = 0; i < a.themes.size(); ++i) {
      themes.push_back(std::string(a.themes[i].name()));
      matched[std::string(a.themes[i].name())] = a.matched_terms[i];
    }
    j["themes"] = std::move(themes);
    j["matched_terms"] = std::move(matched);
    out += j.dump() + '\n';
  }
  return out;
}

// ------------------------------------------------------------------ cities

std::string city_table_text(std::span<const CityReport> reports) {
  if (reports.empty()) return {};
  const std::string kw(track_keyword(reports.front().track));
  const std::string noun = reports.front().track == Track::stress ? "stress" : "relaxation";
  Table t(7, {true, true});
  t.add({"City", "Survey rank 2011 (2014)", "#tweets", "#tweets contain \"" + kw + "\"", noun + " tweets",
         noun + " tweets (first-hand)", "proportion (first-hand)"});
  for (const auto& r : reports) {
    char prop[32];
    std::snprintf(prop, sizeof prop, "%.4e", r.proportion_first_hand);
    t.add({r.city, survey_rank(r.city).value_or("-"), format_count(r.total_tweets), format_count(r.keyword_matched),
           format_count(r.relevant), format_count(r.first_hand), prop});
  }
  return t.render();
}

std::string city_theme_counts_text(std::span<const CityReport> reports) {
  if (reports.empty()) return {};
  const auto themes = ThemeId::all(reports.front().track);
  Table t(reports.size() + 1);
  std::vector<std::string> header{"theme"};
  for (const auto& r : reports) header.push_back(r.city);
  t.add(header);
  for (ThemeId theme : themes) {
    std::vector<std::string> row{std::string(theme.name())};
    for (const auto& r : reports) {
      std::uint64_t n = 0;
      for (const auto& tr : r.theme_table)
        if (tr.theme == theme) n = tr.count;
      row.push_back(std::to_string(n));
    }
    t.add(row);
  }
  return t.render();
}

std::string pvalue_matrix_text(const PairwiseMatrix& m) {
  const auto n = m.cities.size();
  Table t(n + 1);
  std::vector<std::string> header{"Cities"};
  for (const auto& c : m.cities) header.push_back(c);
  t.add(header);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row{m.cities[i]};
    for (std::size_t j = 0; j < n; ++j) row.push_back(m.cells[i][j] ? format_p_value(m.cells[i][j]->p_value) : "NA");
    t.add(row);
  }
  return t.render();
}

std::string pvalue_matrix_json(const PairwiseMatrix& m, bool yates, ContrastBase base) {
  ordered_json j;
  j["cities"] = m.cities;
  j["yates"] = yates;
  j["base"] = base == ContrastBase::total_tweets ? "total_tweets" : "keyword_matched";
  ordered_json p = ordered_json::array();
  ordered_json s = ordered_json::array();
  for (const auto& row : m.cells) {
    ordered_json prow = ordered_json::array();
    ordered_json srow = ordered_json::array();
    for (const auto& cell : row) {
      prow.push_back(cell ? ordered_json(cell->p_value) : ordered_json(nullptr));
      srow.push_back(cell ? ordered_json(cell->statistic) : ordered_json(nullptr));
    }
    p.push_back(std::move(prow));
    s.push_back(std::move(srow));
  }
  j["p_values"] = std::move(p);
  j["statistics"] = std::move(s);
  return j.dump(2) + "\n";
}

std::string keyword_table_text(std::span<const CityReport> reports) {
  std::size_t rows = 0;
  for (const auto& r : reports) rows = std::max(rows, r.top_keywords.size());
  std::vector<bool> left;
  for (std::size_t i = 0; i < reports.size(); ++i) left.insert(left.end(), {true, false, false});
  Table t(reports.size() * 3, left);
  std::vector<std::string> header;
  for (const auto& r : reports) header.insert(header.end(), {r.city, "", ""});
  t.add(header);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::string> row;
    for (const auto& r : reports) {
      if (i < r.top_keywords.size()) {
        const auto& kw = r.top_keywords[i];
        row.insert(row.end(), {kw.term, std::to_string(kw.count), format_fixed(kw.percent, 1) + "%"});
      } else {
        row.insert(row.end(), {"", "", ""});
      }
    }
    t.add(row);
  }
  return t.render();
}

std::string city_report_json(const CityReport& r, std::string_view first_hand_corpus) {
  ordered_json j;
  j["city"] = r.city;
  j["track"] = std::string(track_name(r.track));
  j["total_tweets"] = r.total_tweets;
  j["keyword_matched"] = r.keyword_matched;
  j["relevant"] = r.relevant;
  j["first_hand"] = r.first_hand;
  j["proportion_relevant"] = r.proportion_relevant;
  j["proportion_first_hand"] = r.proportion_first_hand;
  ordered_json themes = ordered_json::array();
  for (const auto& t : r.theme_table)
    themes.push_back({{"theme", std::string(t.theme.name())}, {"count", t.count}, {"proportion", t.proportion}});
  j["themes"] = std::move(themes);
  ordered_json kws = ordered_json::array();
  for (const auto& k : r.top_keywords) kws.push_back({{"term", k.term}, {"count", k.count}, {"percent", k.percent}});
  j["top_keywords"] = std::move(kws);
  if (!first_hand_corpus.empty()) j["first_hand_corpus"] = std::string(first_hand_corpus);
  return j.dump(2) + "\n";
}

CityReportFile city_report_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto track = parse_track(j.at("track").get<std::string>());
    if (!track) throw DataError("city report: unknown track");
    CityReportFile f;
    f.report = make_city_report(j.at("city").get<std::string>(), *track, j.at("total_tweets").get<std::uint64_t>(),
                                j.at("keyword_matched").get<std::uint64_t>(), j.at("relevant").get<std::uint64_t>(),
                                j.at("first_hand").get<std::uint64_t>());
    for (const auto& t : j.at("themes")) {
      const auto id = ThemeId::parse(*track, t.at("theme").get<std::string>());
      if (!id) throw DataError("city report: unknown theme " + t.at("theme").dump());
      auto& row = f.report.theme_table.at(id->index());
      row.count = t.at("count").get<std::uint64_t>();
      row.proportion = t.at("proportion").get<double>();
    }
    for (const auto& k : j.at("top_keywords"))
      f.report.top_keywords.push_back(
          {k.at("term").get<std::string>(), k.at("count").get<std::uint64_t>(), k.at("percent").get<double>()});
    if (j.contains("first_hand_corpus")) f.first_hand_corpus = j["first_hand_corpus"].get<std::string>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("city report: ") + e.what());
  }
}

}  // namespace stresslens

#include "stresslens/tokenize.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <stdexcept>
#include <unordered_set>

#include "stresslens/error.hpp"
#include "stresslens/text.hpp"

namespace stresslens {

namespace {

constexpr UChar32 kRightSingleQuote = 0x2019;

bool ascii_token_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
}

bool token_char(UChar32 c) noexcept {
  if (c == '\'') return true;
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_L_MASK | U_GC_ND_MASK)) != 0;
}

void emit(TokenSeq& out, std::string& current) {
  const auto first = current.find_first_not_of('\'');
  if (first != std::string::npos) {
    const auto last = current.find_last_not_of('\'');
    out.emplace_back(current, first, last - first + 1);
  }
  current.clear();
}

}  // namespace

TokenSeq tokenize(std::string_view raw) {
  const std::string norm = text::normalize_lower(raw);
  TokenSeq out;
  std::string current;

  if (text::is_ascii(norm)) {
    for (char c : norm) {
      if (ascii_token_char(c))
        current += c;
      else if (!current.empty())
        emit(out, current);
    }
    if (!current.empty()) emit(out, current);
    return out;
  }

  const auto* p = reinterpret_cast<const std::uint8_t*>(norm.data());
  const auto len = static_cast<std::int32_t>(norm.size());
  std::int32_t i = 0;
  while (i < len) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c == kRightSingleQuote) c = '\'';
    if (c >= 0 && token_char(c)) {
      if (c == '\'')
        current += '\'';
      else
        current.append(norm, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
    } else if (!current.empty()) {
      emit(out, current);
    }
  }
  if (!current.empty()) emit(out, current);
  return out;
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, int n) {
  if (n == 1) return {tokens.begin(), tokens.end()};
  if (n != 2) throw std::invalid_argument("ngrams: n must be 1 or 2, got " + std::to_string(n));
  std::vector<std::string> out;
  if (tokens.size() < 2) return out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back(tokens[i] + ' ' + tokens[i + 1]);
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)) {
  if (terms_.size() != doc_freq_.size())
    throw std::invalid_argument("vocabulary: terms and doc_freq differ in length");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second)
      throw std::invalid_argument("vocabulary: duplicate term '" + terms_[i] + "'");
}

std::int64_t Vocabulary::find(std::string_view term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

Vocabulary build_vocabulary(std::span<const TokenSeq> docs, std::uint32_t min_df) {
  if (docs.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  struct Entry {
    std::uint32_t order;
    std::uint32_t df;
  };
  std::unordered_map<std::string_view, Entry> stats;
  std::vector<std::string_view> order;
  std::unordered_set<std::string_view> in_doc;
  for (const auto& doc : docs) {
    in_doc.clear();
    for (const auto& tok : doc) {
      if (!in_doc.insert(tok).second) continue;
      auto [it, inserted] = stats.try_emplace(tok, Entry{static_cast<std::uint32_t>(order.size()), 0});
      if (inserted) order.push_back(tok);
      ++it->second.df;
    }
  }
  std::vector<std::string> terms;
  std::vector<std::uint32_t> dfs;
  for (auto term : order) {
    const auto df = stats.at(term).df;
    if (df < min_df) continue;
    terms.emplace_back(term);
    dfs.push_back(df);
  }
  return Vocabulary(std::move(terms), std::move(dfs));
}

Vocabulary build_vocabulary(const Corpus& c, std::uint32_t min_df) {
  std::vector<TokenSeq> docs;
  docs.reserve(c.records.size());
  for (const auto& rec : c.records) docs.push_back(tokenize(rec.text));
  return build_vocabulary(docs, min_df);
}

std::uint64_t FeatureVector::total() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& [id, n] : entries) sum += n;
  return sum;
}

std::uint32_t FeatureVector::count(TermId id) const noexcept {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const auto& e, TermId key) { return e.first < key; });
  return it != entries.end() && it->first == id ? it->second : 0;
}

FeatureVector vectorize(std::span<const std::string> tokens, const Vocabulary& v) {
  std::vector<TermId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto id = v.find(t);
    if (id >= 0) ids.push_back(static_cast<TermId>(id));
  }
  std::sort(ids.begin(), ids.end());
  FeatureVector x;
  for (auto id : ids) {
    if (!x.entries.empty() && x.entries.back().first == id)
      ++x.entries.back().second;
    else
      x.entries.emplace_back(id, 1u);
  }
  return x;
}

FeatureVector binarize(FeatureVector x) {
  for (auto& e : x.entries) e.second = 1;
  return x;
}

}  // namespace stresslens

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stresslens/corpus.hpp"

namespace stresslens {

using TokenSeq = std::vector<std::string>;
using TermId = std::uint32_t;

/// Lowercased, NFC-normalized tokens: maximal runs of letters, digits and
/// apostrophes, with leading/trailing apostrophes trimmed. Every other
/// character (including '#' and '@') separates tokens. U+2019 is read as
/// an apostrophe.
TokenSeq tokenize(std::string_view text);

/// n = 1 returns the tokens, n = 2 the adjacent pairs joined by one space.
/// Throws std::invalid_argument for any other n.
std::vector<std::string> ngrams(std::span<const std::string> tokens, int n);

/// Joins tokens with single spaces.
std::string join_tokens(std::span<const std::string> tokens);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Builds from explicit terms; throws std::invalid_argument on duplicates
  /// or a size mismatch.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq);

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint32_t>& doc_freqs() const noexcept { return doc_freq_; }
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::uint32_t doc_freq(TermId id) const { return doc_freq_.at(id); }

  /// Returns -1 for out-of-vocabulary terms.
  std::int64_t find(std::string_view term) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.doc_freq_ == b.doc_freq_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> doc_freq_;
  std::unordered_map<std::string, TermId, Hash, std::equal_to<>> index_;
};

/// Unigram vocabulary over documents, in order of first appearance, keeping
/// terms that occur in at least `min_df` documents. Throws DataError when
/// there are no documents.
Vocabulary build_vocabulary(std::span<const TokenSeq> docs, std::uint32_t min_df = 1);
Vocabulary build_vocabulary(const Corpus& c, std::uint32_t min_df = 1);

/// Sparse bag-of-words, sorted by term id; every stored count is >= 1.
struct FeatureVector {
  std::vector<std::pair<TermId, std::uint32_t>> entries;

  std::size_t nnz() const noexcept { return entries.size(); }
  std::uint64_t total() const noexcept;
  /// Count for `id`, 0 when absent.
  std::uint32_t count(TermId id) const noexcept;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector vectorize(std::span<const std::string> tokens, const Vocabulary& v);

/// Caps every count at 1.
FeatureVector binarize(FeatureVector x);

}  // namespace stresslens

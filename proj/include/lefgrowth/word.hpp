#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "error.hpp"

namespace lefg {

using Word = std::string;

/// Ordered finite alphabet of single-byte symbols. Order is the order given.
class Alphabet {
public:
  Alphabet() = default;

  explicit Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
    rank_.fill(-1);
    if (symbols_.size() < 2) throw PreconditionError("alphabet needs at least two symbols");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      auto c = static_cast<unsigned char>(symbols_[i]);
      if (rank_[c] != -1) throw PreconditionError(std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
      rank_[c] = static_cast<int>(i);
    }
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& symbols() const noexcept { return symbols_; }
  char symbol(std::size_t i) const { return symbols_.at(i); }
  int rank(char c) const noexcept { return rank_[static_cast<unsigned char>(c)]; }
  bool contains(char c) const noexcept { return rank(c) >= 0; }

  bool contains_word(std::string_view w) const noexcept {
    return std::all_of(w.begin(), w.end(), [this](char c) { return contains(c); });
  }

  /// Lexicographic order induced by the symbol order.
  bool less(std::string_view a, std::string_view b) const noexcept {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      int ra = rank(a[i]), rb = rank(b[i]);
      if (ra != rb) return ra < rb;
    }
    return a.size() < b.size();
  }

  bool operator==(const Alphabet& o) const noexcept { return symbols_ == o.symbols_; }

private:
  std::string symbols_;
  std::array<int, 256> rank_{};
};

/// F_n of some word: every member has length n, sorted in alphabet order.
struct FactorSet {
  std::size_t n = 0;
  std::vector<Word> words;
  bool saturated = false;  // certified equal to the full factor language at length n
  Alphabet alphabet;

  std::size_t size() const noexcept { return words.size(); }

  bool contains(std::string_view w) const {
    auto cmp = [this](const Word& a, std::string_view b) { return alphabet.less(a, b); };
    auto it = std::lower_bound(words.begin(), words.end(), w, cmp);
    return it != words.end() && *it == w;
  }
};

/// Sorts and deduplicates in alphabet order.
inline void normalize_words(const Alphabet& alphabet, std::vector<Word>& words) {
  std::sort(words.begin(), words.end(),
            [&](const Word& a, const Word& b) { return alphabet.less(a, b); });
  words.erase(std::unique(words.begin(), words.end()), words.end());
}

/// Distinct length-n windows of a finite word, in alphabet order.
inline FactorSet factors(const Alphabet& alphabet, std::string_view w, std::size_t n) {
  if (n < 1 || n > w.size())
    throw PreconditionError("factor length " + std::to_string(n) + " out of range for word of length " +
                            std::to_string(w.size()));
  if (!alphabet.contains_word(w)) throw PreconditionError("word has letters outside the alphabet");
  std::unordered_set<std::string_view> seen;
  for (std::size_t k = 0; k + n <= w.size(); ++k) seen.insert(w.substr(k, n));
  FactorSet out;
  out.n = n;
  out.alphabet = alphabet;
  out.words.reserve(seen.size());
  for (auto v : seen) out.words.emplace_back(v);
  normalize_words(alphabet, out.words);
  return out;
}

/// A word of odd length 2m+1 naming the m-cylinder centred on its middle letter.
struct CenteredWord {
  Word word;

  CenteredWord() = default;
  explicit CenteredWord(Word w) : word(std::move(w)) {
    if (word.size() % 2 == 0) throw PreconditionError("centered word must have odd length: '" + word + "'");
  }

  int radius() const noexcept { return static_cast<int>(word.size() / 2); }
  char center() const { return word[word.size() / 2]; }

  /// The k-cylinder containing this one, for k <= radius().
  CenteredWord coarsened(int k) const {
    if (k < 0 || k > radius()) throw PreconditionError("coarsening radius out of range");
    return CenteredWord(word.substr(static_cast<std::size_t>(radius() - k), static_cast<std::size_t>(2 * k + 1)));
  }

  bool operator==(const CenteredWord&) const = default;
};

}  // namespace lefg

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "scan.hpp"
#include "word.hpp"

namespace lefg {

enum class SourceKind { substitution, jlp, periodic, limit };

inline const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::substitution: return "substitution";
    case SourceKind::jlp: return "jlp";
    case SourceKind::periodic: return "periodic";
    case SourceKind::limit: return "limit";
  }
  return "unknown";
}

/// Inclusive index range on which a finite source can answer.
struct Span {
  std::int64_t lo;
  std::int64_t hi;
};

/// Window oracle for one two-sided infinite word x. Implementations are immutable
/// after construction; internal caches are pure memoization and guarded.
class WordSource {
public:
  virtual ~WordSource() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual SourceKind kind() const = 0;

  /// x_i .. x_j inclusive.
  virtual Word window(std::int64_t i, std::int64_t j) const = 0;

  /// Index range the source can serve; empty for genuinely infinite sources.
  virtual std::optional<Span> span() const { return std::nullopt; }

  /// F_n(x) when the source can certify it.
  virtual std::optional<FactorSet> exact_factors(std::size_t) const { return std::nullopt; }

  /// R_x(n) when the source can certify it.
  virtual std::optional<std::size_t> exact_recurrence(std::size_t) const { return std::nullopt; }

  /// Canonical one-line description, used for digests.
  virtual std::string describe() const = 0;

  char at(std::int64_t i) const { return window(i, i)[0]; }
};

namespace detail {

inline void check_window_args(std::int64_t i, std::int64_t j) {
  if (i > j) throw PreconditionError("window(" + std::to_string(i) + ", " + std::to_string(j) + ") has i > j");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Substitution fixed points

/// Two-sided fixed point of a primitive substitution. The right half is the
/// one-sided fixed point grown from the seed; the left half is the left-infinite
/// fixed point of a power of the substitution, started from the first letter b
/// (alphabet order) such that b.seed is a legal 2-factor and some power maps b
/// to a word ending in b.
class SubstitutionSource : public WordSource {
public:
  SubstitutionSource(Alphabet alphabet, std::map<char, Word> rules, char seed, Budget budget = {})
      : alphabet_(std::move(alphabet)), seed_(seed), budget_(budget) {
    for (char c : alphabet_.symbols()) {
      auto it = rules.find(c);
      if (it == rules.end()) throw PreconditionError(std::string("no substitution rule for '") + c + "'");
      if (it->second.empty()) throw PreconditionError(std::string("empty image for '") + c + "'");
      if (!alphabet_.contains_word(it->second))
        throw PreconditionError(std::string("image of '") + c + "' leaves the alphabet");
      rules_[static_cast<unsigned char>(c)] = it->second;
    }
    if (rules.size() != alphabet_.size()) throw PreconditionError("rules mention symbols outside the alphabet");
    if (!alphabet_.contains(seed)) throw PreconditionError("seed is not an alphabet symbol");
    if (!is_primitive()) throw PreconditionError("substitution is not primitive");
    const Word& img = rule(seed);
    if (img.size() < 2 || img[0] != seed)
      throw PreconditionError(std::string("seed '") + seed + "' is not a prefix of a strictly longer image of itself");
    compute_legal_pairs();
    choose_left_extension();
    right_ = Word(1, seed_);
    left_ = Word(1, left_letter_);
  }

  const Alphabet& alphabet() const override { return alphabet_; }
  SourceKind kind() const override { return SourceKind::substitution; }

  Word window(std::int64_t i, std::int64_t j) const override {
    detail::check_window_args(i, j);
    std::lock_guard lock(mu_);
    if (j >= 0) ensure_right(static_cast<std::size_t>(j) + 1);
    if (i < 0) ensure_left(static_cast<std::size_t>(-i));
    Word out;
    out.reserve(static_cast<std::size_t>(j - i + 1));
    if (i < 0) {
      std::int64_t stop = std::min<std::int64_t>(j, -1);
      // x_{-k} is left_[left_.size() - k]
      out.append(left_, left_.size() - static_cast<std::size_t>(-i), static_cast<std::size_t>(stop - i + 1));
    }
    if (j >= 0) {
      std::int64_t start = std::max<std::int64_t>(i, 0);
      out.append(right_, static_cast<std::size_t>(start), static_cast<std::size_t>(j - start + 1));
    }
    return out;
  }

  std::optional<FactorSet> exact_factors(std::size_t n) const override {
    if (n < 1) throw PreconditionError("factor length must be positive");
    FactorSet out;
    out.n = n;
    out.alphabet = alphabet_;
    out.saturated = true;
    if (n == 1) {
      for (char c : alphabet_.symbols()) out.words.emplace_back(1, c);
      return out;
    }
    int k = power_covering(n - 1);
    std::unordered_set<std::string_view> seen;
    std::vector<Word> images;
    images.reserve(legal_pairs_.size());
    for (const auto& w : legal_pairs_) images.push_back(iterate(w, k));
    for (const auto& s : images)
      for (std::size_t p = 0; p + n <= s.size(); ++p) seen.insert(std::string_view(s).substr(p, n));
    out.words.reserve(seen.size());
    for (auto v : seen) out.words.emplace_back(v);
    normalize_words(alphabet_, out.words);
    return out;
  }

  /// Every R-factor lies inside phi^k(ab) for a legal pair ab once min |phi^k(c)| >= R-1,
  /// so the largest window-recurrence over those images is exact at that k.
  std::optional<std::size_t> exact_recurrence(std::size_t n) const override {
    auto fn = exact_factors(n);
    FactorIndex index(*fn);
    int k = power_covering(n - 1 > 0 ? n - 1 : 1);
    for (;; ++k) {
      std::size_t estimate = 0;
      bool complete = true;
      for (const auto& w : legal_pairs_) {
        Word s = iterate(w, k);
        auto r = window_recurrence(s, index);
        if (!r) {
          complete = false;
          break;
        }
        estimate = std::max(estimate, *r);
      }
      if (complete && min_image_length(k) + 1 >= estimate) return estimate;
    }
  }

  std::string describe() const override {
    std::string out = "substitution;" + alphabet_.symbols();
    for (char c : alphabet_.symbols()) out += std::string(";") + c + "->" + rule(c);
    out += std::string(";seed=") + seed_;
    return out;
  }

  const Word& rule(char c) const { return rules_[static_cast<unsigned char>(c)]; }
  char seed() const noexcept { return seed_; }
  char left_letter() const noexcept { return left_letter_; }
  const std::vector<Word>& legal_pairs() const noexcept { return legal_pairs_; }

  Word apply(std::string_view w) const {
    Word out;
    for (char c : w) out += rule(c);
    return out;
  }

  Word iterate(std::string_view w, int times) const {
    Word cur(w);
    for (int t = 0; t < times; ++t) {
      cur = apply(cur);
      if (cur.size() > budget_.window) throw BudgetError("substitution image exceeds window budget");
    }
    return cur;
  }

private:
  bool is_primitive() const {
    const std::size_t d = alphabet_.size();
    std::vector<std::vector<bool>> step(d, std::vector<bool>(d, false));
    for (std::size_t a = 0; a < d; ++a)
      for (char c : rule(alphabet_.symbol(a))) step[a][static_cast<std::size_t>(alphabet_.rank(c))] = true;
    auto power = step;
    std::size_t limit = (d - 1) * (d - 1) + 1;
    for (std::size_t k = 1; k <= limit; ++k) {
      bool positive = true;
      for (auto& row : power)
        for (bool v : row) positive = positive && v;
      if (positive) return true;
      std::vector<std::vector<bool>> next(d, std::vector<bool>(d, false));
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          if (power[a][b])
            for (std::size_t c = 0; c < d; ++c)
              if (step[b][c]) next[a][c] = true;
      power = std::move(next);
    }
    return false;
  }

  // Least fixed point of: 2-factors inside phi(c), and 2-factors of phi(ab) for legal ab.
  void compute_legal_pairs() {
    std::set<Word> pairs;
    for (char c : alphabet_.symbols()) {
      const Word& img = rule(c);
      for (std::size_t p = 0; p + 2 <= img.size(); ++p) pairs.insert(img.substr(p, 2));
    }
    for (bool grew = true; grew;) {
      grew = false;
      std::vector<Word> current(pairs.begin(), pairs.end());
      for (const auto& w : current) {
        Word img = apply(w);
        for (std::size_t p = 0; p + 2 <= img.size(); ++p) grew |= pairs.insert(img.substr(p, 2)).second;
      }
    }
    legal_pairs_.assign(pairs.begin(), pairs.end());
    normalize_words(alphabet_, legal_pairs_);
  }

  void choose_left_extension() {
    const std::size_t d = alphabet_.size();
    for (char b : alphabet_.symbols()) {
      Word pair{b, seed_};
      if (std::find(legal_pairs_.begin(), legal_pairs_.end(), pair) == legal_pairs_.end()) continue;
      // last-letter map; b must be periodic under it
      char c = b;
      for (std::size_t p = 1; p <= d; ++p) {
        c = rule(c).back();
        if (c != b) continue;
        int power = static_cast<int>(p);
        while (iterate(Word(1, b), power).size() < 2) power += static_cast<int>(p);
        left_letter_ = b;
        left_power_ = power;
        return;
      }
    }
    throw PreconditionError("seed admits no left extension to a two-sided fixed point");
  }

  std::size_t min_image_length(int k) const {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> len(alphabet_.size(), 1);
    for (int t = 0; t < k; ++t) {
      std::vector<std::size_t> next(alphabet_.size(), 0);
      for (std::size_t a = 0; a < alphabet_.size(); ++a)
        for (char c : rule(alphabet_.symbol(a)))
          next[a] = std::min(next[a] + len[static_cast<std::size_t>(alphabet_.rank(c))], budget_.window + 1);
      len = std::move(next);
    }
    for (auto l : len) best = std::min(best, l);
    return best;
  }

  int power_covering(std::size_t length) const {
    int k = 0;
    while (min_image_length(k) < length) {
      if (++k > 200) throw BudgetError("substitution does not grow enough to cover length " + std::to_string(length));
    }
    return k;
  }

  void ensure_right(std::size_t len) const {
    if (len > budget_.window) throw BudgetError("window request exceeds budget");
    while (right_.size() < len) right_ = apply(right_);
  }

  void ensure_left(std::size_t len) const {
    if (len > budget_.window) throw BudgetError("window request exceeds budget");
    while (left_.size() < len) left_ = iterate(left_, left_power_);
  }

  Alphabet alphabet_;
  std::array<Word, 256> rules_{};
  char seed_;
  Budget budget_;
  std::vector<Word> legal_pairs_;
  char left_letter_ = 0;
  int left_power_ = 1;
  mutable std::mutex mu_;
  mutable Word right_;
  mutable Word left_;
};

inline std::shared_ptr<SubstitutionSource> substitution_source(const Alphabet& alphabet, std::map<char, Word> rules,
                                                               char seed, Budget budget = {}) {
  return std::make_shared<SubstitutionSource>(alphabet, std::move(rules), seed, budget);
}

inline std::shared_ptr<SubstitutionSource> fibonacci_source(Budget budget = {}) {
  return substitution_source(Alphabet("ab"), {{'a', "ab"}, {'b', "a"}}, 'a', budget);
}

// ---------------------------------------------------------------------------
// Periodic test words

/// x_i = pattern[i mod |pattern|]. Not minimal-aperiodic; used for negative tests.
class PeriodicSource : public WordSource {
public:
  PeriodicSource(Alphabet alphabet, Word pattern) : alphabet_(std::move(alphabet)), pattern_(std::move(pattern)) {
    if (pattern_.empty()) throw PreconditionError("periodic pattern is empty");
    if (!alphabet_.contains_word(pattern_)) throw PreconditionError("pattern leaves the alphabet");
  }

  const Alphabet& alphabet() const override { return alphabet_; }
  SourceKind kind() const override { return SourceKind::periodic; }

  Word window(std::int64_t i, std::int64_t j) const override {
    detail::check_window_args(i, j);
    auto p = static_cast<std::int64_t>(pattern_.size());
    Word out;
    out.reserve(static_cast<std::size_t>(j - i + 1));
    for (std::int64_t k = i; k <= j; ++k) out += pattern_[static_cast<std::size_t>(((k % p) + p) % p)];
    return out;
  }

  std::optional<FactorSet> exact_factors(std::size_t n) const override {
    if (n < 1) throw PreconditionError("factor length must be positive");
    auto p = static_cast<std::int64_t>(pattern_.size());
    Word s = window(0, p + static_cast<std::int64_t>(n) - 2);
    auto fs = factors(alphabet_, s, n);
    fs.saturated = true;
    return fs;
  }

  std::optional<std::size_t> exact_recurrence(std::size_t n) const override {
    auto fn = exact_factors(n);
    FactorIndex index(*fn);
    auto p = static_cast<std::int64_t>(pattern_.size());
    // two full periods of starts give every cyclic gap
    Word s = window(0, 2 * p + static_cast<std::int64_t>(n) - 1);
    return interior_recurrence(s, index);
  }

  std::string describe() const override { return "periodic;" + alphabet_.symbols() + ";" + pattern_; }

  const Word& pattern() const noexcept { return pattern_; }

private:
  Alphabet alphabet_;
  Word pattern_;
};

// ---------------------------------------------------------------------------
// Limit words of nested finite words

/// One finite word x^(j) served lazily: extract(pos, len) returns letters pos..pos+len-1 (0-based).
struct LimitLevel {
  std::int64_t length = 0;
  std::function<Word(std::int64_t, std::int64_t)> extract;
};

/// The unique point lying in every cylinder <<x^(j)>>_{M_j}, M_{j+1} = M_j + K_j - 1.
/// Windows are answered from the least level whose span covers them.
class LimitWordSource : public WordSource {
public:
  LimitWordSource(Alphabet alphabet, std::vector<LimitLevel> levels, std::vector<std::int64_t> anchors_k,
                  std::int64_t m0, SourceKind kind = SourceKind::limit, std::size_t exact_bound = 0,
                  std::string description = "limit")
      : alphabet_(std::move(alphabet)),
        levels_(std::move(levels)),
        k_(std::move(anchors_k)),
        kind_(kind),
        exact_bound_(exact_bound),
        description_(std::move(description)) {
    if (levels_.size() < 2) throw PreconditionError("limit word needs at least two levels");
    if (k_.size() + 1 < levels_.size()) throw PreconditionError("missing anchor index K_j");
    if (m0 < 1 || m0 > levels_[0].length) throw PreconditionError("M_0 must lie in [1, L_0]");
    m_.push_back(m0);
    for (std::size_t j = 0; j + 1 < levels_.size(); ++j) {
      const auto& lo = levels_[j];
      const auto& hi = levels_[j + 1];
      std::string where = "level " + std::to_string(j);
      if (hi.length <= lo.length) throw PreconditionError(where + ": lengths must increase strictly");
      if (k_[j] < 2 || k_[j] > hi.length - lo.length)
        throw PreconditionError(where + ": K_j must satisfy 2 <= K_j <= L_{j+1} - L_j");
      if (hi.extract(k_[j] - 1, lo.length) != lo.extract(0, lo.length))
        throw PreconditionError(where + ": x^(j) is not the K_j-th factor of x^(j+1)");
      m_.push_back(m_.back() + k_[j] - 1);
    }
    k_.resize(levels_.size() - 1);
  }

  const Alphabet& alphabet() const override { return alphabet_; }
  SourceKind kind() const override { return kind_; }

  Word window(std::int64_t i, std::int64_t j) const override {
    detail::check_window_args(i, j);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      std::int64_t lo = 1 - m_[l], hi = levels_[l].length - m_[l];
      if (lo <= i && j <= hi) return levels_[l].extract(m_[l] - 1 + i, j - i + 1);
    }
    throw PreconditionError("window(" + std::to_string(i) + ", " + std::to_string(j) +
                            ") lies outside the materialized levels");
  }

  std::optional<Span> span() const override {
    const auto& top = levels_.back();
    return Span{1 - m_.back(), top.length - m_.back()};
  }

  std::optional<FactorSet> exact_factors(std::size_t n) const override {
    if (n < 1) throw PreconditionError("factor length must be positive");
    if (n > exact_bound_) return std::nullopt;
    const auto& top = levels_.back();
    auto fs = factors(alphabet_, top.extract(0, top.length), n);
    fs.saturated = true;
    return fs;
  }

  std::string describe() const override { return description_; }

  std::size_t level_count() const noexcept { return levels_.size(); }
  const std::vector<std::int64_t>& anchors_m() const noexcept { return m_; }
  const std::vector<std::int64_t>& anchors_k() const noexcept { return k_; }
  const LimitLevel& level(std::size_t j) const { return levels_.at(j); }
  std::size_t exact_bound() const noexcept { return exact_bound_; }

private:
  Alphabet alphabet_;
  std::vector<LimitLevel> levels_;
  std::vector<std::int64_t> k_;
  std::vector<std::int64_t> m_;
  SourceKind kind_;
  std::size_t exact_bound_;
  std::string description_;
};

/// Limit of explicit finite words; levels[j].second is K_j (ignored for the last level).
inline std::shared_ptr<LimitWordSource> limit_word(const Alphabet& alphabet,
                                                   const std::vector<std::pair<Word, std::int64_t>>& levels,
                                                   std::int64_t m0) {
  std::vector<LimitLevel> lv;
  std::vector<std::int64_t> ks;
  std::string desc = "limit;" + alphabet.symbols();
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const auto& [w, k] = levels[j];
    if (!alphabet.contains_word(w)) throw PreconditionError("level " + std::to_string(j) + " leaves the alphabet");
    auto shared = std::make_shared<const Word>(w);
    lv.push_back({static_cast<std::int64_t>(w.size()), [shared](std::int64_t pos, std::int64_t len) {
                    if (pos < 0 || pos + len > static_cast<std::int64_t>(shared->size()))
                      throw PreconditionError("extract outside level word");
                    return shared->substr(static_cast<std::size_t>(pos), static_cast<std::size_t>(len));
                  }});
    if (j + 1 < levels.size()) ks.push_back(k);
    desc += ";" + w + "@" + std::to_string(k);
  }
  desc += ";M0=" + std::to_string(m0);
  return std::make_shared<LimitWordSource>(alphabet, std::move(lv), std::move(ks), m0, SourceKind::limit, 0, desc);
}

}  // namespace lefg

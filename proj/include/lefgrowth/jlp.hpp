#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "growth_table.hpp"
#include "language.hpp"
#include "scan.hpp"
#include "subshift.hpp"
#include "word.hpp"
#include "word_source.hpp"

namespace lefg {

struct JlpParams {
  double r = 2.0;
  std::int64_t x = 30;
  std::optional<std::int64_t> toy_cap;
  std::uint64_t seed = 1;
  int levels = 1;                         // highest level index J
  std::size_t max_collection = 5'000'000; // largest P_j we are willing to materialize

  bool toy() const noexcept { return toy_cap.has_value(); }

  void validate() const {
    if (!(r >= 2.0)) throw PreconditionError("r must be at least 2");
    if (x <= 0 || x % 3 != 0) throw PreconditionError("x must be a positive multiple of 3");
    std::int64_t k = x / 3 - 2;
    if (k < 0 || (k < 62 && (std::int64_t{1} << k) < x))
      throw PreconditionError("x = " + std::to_string(x) + " is too small: need 2^(x/3 - 2) >= x");
    if (toy_cap && (*toy_cap < 3 || *toy_cap % 3 != 0)) throw PreconditionError("toy cap must be a positive multiple of 3");
    if (levels < 1) throw PreconditionError("need at least levels 0..1");
  }
};

/// One family C_j. Level 0 stores its words; higher levels store one permutation per member.
struct JlpLevel {
  int j = 0;
  std::int64_t N = 0;
  std::int64_t l = 0;
  std::vector<Word> words;                      // j = 0
  std::vector<std::vector<std::int32_t>> perms; // j > 0: P_{j-1}, 0-based one-line notation, sorted
  double log_formula = 0;                       // log of the untruncated |P_{j-1}| (j > 0)
  bool capped = false;
};

namespace detail {

/// Uniform integer in [0, n) by rejection; platform independent.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    std::uint64_t v = rng();
    if (v < limit) return v % n;
  }
}

inline std::uint64_t level_seed(std::uint64_t seed, int j) {
  return seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(j) * 0xbf58476d1ce4e5b9ULL + 1;
}

/// log |P_j| as prescribed: j even 3 floor(exp((log N)^r) / 3), otherwise N^2.
inline double log_collection_size(double r, std::int64_t N, int j) {
  double ln = std::log(static_cast<double>(N));
  return j % 2 == 0 ? std::pow(ln, r) : 2.0 * ln;
}

/// Exact |P_j| when it fits, from the same formula.
inline std::optional<std::int64_t> collection_size(double r, std::int64_t N, int j) {
  if (j % 2 == 1) {
    if (N > 3'000'000'000LL) return std::nullopt;
    return N * N;
  }
  long double e = std::pow(std::log(static_cast<long double>(N)), static_cast<long double>(r));
  if (e > 43.0L) return std::nullopt;
  long double v = std::floor(std::exp(e) / 3.0L) * 3.0L;
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// The built levels C_0..C_J with lazy expansion of their words.
class JlpFamily {
public:
  explicit JlpFamily(JlpParams p) : params_(std::move(p)) { params_.validate(); }

  const JlpParams& params() const noexcept { return params_; }
  const std::vector<JlpLevel>& levels() const noexcept { return levels_; }
  const JlpLevel& level(std::size_t j) const { return levels_.at(j); }
  std::size_t size() const noexcept { return levels_.size(); }

  void push(JlpLevel lv) { levels_.push_back(std::move(lv)); }

  /// Index (into C_{j-1}) of block t of member i of C_j.
  std::int64_t child(int j, std::int64_t i, std::int64_t t) const {
    const auto& prev = levels_[static_cast<std::size_t>(j - 1)];
    std::int64_t third = prev.N / 3;
    if (t < third || t >= 2 * third) return t;
    return third + levels_[static_cast<std::size_t>(j)].perms[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - third)];
  }

  /// Letters pos..pos+len-1 of member i of C_j.
  Word extract(int j, std::int64_t i, std::int64_t pos, std::int64_t len) const {
    Word out;
    out.reserve(static_cast<std::size_t>(len));
    append(j, i, pos, len, out);
    return out;
  }

  Word expand(int j, std::int64_t i) const { return extract(j, i, 0, levels_[static_cast<std::size_t>(j)].l); }

private:
  void append(int j, std::int64_t i, std::int64_t pos, std::int64_t len, Word& out) const {
    const auto& lv = levels_[static_cast<std::size_t>(j)];
    if (pos < 0 || len < 0 || pos + len > lv.l) throw PreconditionError("extract outside a level word");
    if (j == 0) {
      out.append(lv.words[static_cast<std::size_t>(i)], static_cast<std::size_t>(pos), static_cast<std::size_t>(len));
      return;
    }
    const std::int64_t bl = levels_[static_cast<std::size_t>(j - 1)].l;
    while (len > 0) {
      std::int64_t t = pos / bl, off = pos % bl;
      std::int64_t take = std::min(len, bl - off);
      append(j - 1, child(j, i, t), off, take, out);
      pos += take;
      len -= take;
    }
  }

  JlpParams params_;
  std::vector<JlpLevel> levels_;
};

/// C_0 = { a^{x/3} v b^{x/3} }, v drawn from the seed among words starting with b and ending with a.
inline JlpLevel build_level0(const JlpParams& p) {
  p.validate();
  const auto k = static_cast<std::size_t>(p.x / 3);
  std::mt19937_64 rng(detail::level_seed(p.seed, 0));
  std::unordered_set<Word> chosen;
  while (static_cast<std::int64_t>(chosen.size()) < p.x) {
    Word v(k, 'a');
    v.front() = 'b';
    for (std::size_t i = 1; i + 1 < k; ++i) v[i] = detail::bounded(rng, 2) ? 'b' : 'a';
    chosen.insert(v);
  }
  JlpLevel lv;
  lv.j = 0;
  lv.N = p.x;
  lv.l = p.x;
  const Word pre(k, 'a'), suf(k, 'b');
  for (const auto& v : chosen) lv.words.push_back(pre + v + suf);
  std::sort(lv.words.begin(), lv.words.end());
  for (const auto& w : lv.words) {
    // a^{x/3} and b^{x/3} only at the ends
    for (std::size_t s = 1; s + k <= w.size(); ++s) {
      auto f = std::string_view(w).substr(s, k);
      if ((f == pre) || (f == suf && s != w.size() - k))
        throw ConsistencyError("level-0 word has an internal copy of its prefix or suffix block");
    }
  }
  return lv;
}

/// C_{j+1} from C_j with a seeded collection P_j of distinct permutations of N_j / 3 points.
inline JlpLevel build_next_level(const JlpLevel& prev, const JlpParams& p) {
  JlpLevel lv;
  lv.j = prev.j + 1;
  const std::int64_t third = prev.N / 3;
  lv.log_formula = detail::log_collection_size(p.r, prev.N, prev.j);
  auto formula = detail::collection_size(p.r, prev.N, prev.j);
  const double log_fact = std::lgamma(static_cast<double>(third) + 1.0);
  std::int64_t size;
  if (p.toy_cap) {
    size = formula ? std::min(*p.toy_cap, *formula) : *p.toy_cap;
    lv.capped = !formula || size < *formula;
  } else {
    if (!formula) throw BudgetError("|P_" + std::to_string(prev.j) + "| does not fit in 64 bits; use a toy cap");
    size = *formula;
  }
  if (std::log(static_cast<double>(size)) > log_fact + 1e-9)
    throw PreconditionError("|P_" + std::to_string(prev.j) + "| = " + std::to_string(size) + " exceeds (N_j/3)!");
  if (static_cast<std::size_t>(size) > p.max_collection)
    throw BudgetError("|P_" + std::to_string(prev.j) + "| = " + std::to_string(size) + " exceeds the materialization budget");
  if (size % 3 != 0) throw ConsistencyError("collection size is not divisible by 3");

  std::mt19937_64 rng(detail::level_seed(p.seed, lv.j));
  std::unordered_set<std::string> seen;
  std::vector<std::int32_t> base(static_cast<std::size_t>(third));
  for (std::int64_t i = 0; i < third; ++i) base[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
  while (static_cast<std::int64_t>(lv.perms.size()) < size) {
    auto pi = base;
    for (std::int64_t i = third - 1; i > 0; --i)
      std::swap(pi[static_cast<std::size_t>(i)], pi[static_cast<std::size_t>(detail::bounded(rng, static_cast<std::uint64_t>(i + 1)))]);
    std::string key(reinterpret_cast<const char*>(pi.data()), pi.size() * sizeof(std::int32_t));
    if (seen.insert(std::move(key)).second) lv.perms.push_back(std::move(pi));
  }
  std::sort(lv.perms.begin(), lv.perms.end());
  lv.N = size;
  if (prev.l > std::numeric_limits<std::int64_t>::max() / prev.N) throw BudgetError("level length overflows");
  lv.l = prev.l * prev.N;
  return lv;
}

inline JlpFamily build_family(const JlpParams& p) {
  JlpFamily fam(p);
  fam.push(build_level0(p));
  for (int j = 1; j <= p.levels; ++j) fam.push(build_next_level(fam.level(static_cast<std::size_t>(j - 1)), p));
  return fam;
}

enum class ClauseStatus { pass, fail, skipped };

inline const char* to_string(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::pass: return "pass";
    case ClauseStatus::fail: return "fail";
    case ClauseStatus::skipped: return "skipped";
  }
  return "?";
}

struct Clause {
  std::string name;
  ClauseStatus status = ClauseStatus::skipped;
  std::string detail;
};

struct ClauseReport {
  std::vector<Clause> clauses;

  void add(std::string name, bool ok, std::string detail = {}) {
    clauses.push_back({std::move(name), ok ? ClauseStatus::pass : ClauseStatus::fail, std::move(detail)});
  }
  void skip(std::string name, std::string why) { clauses.push_back({std::move(name), ClauseStatus::skipped, std::move(why)}); }

  bool ok() const {
    return std::none_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.status == ClauseStatus::fail; });
  }
  std::size_t count(ClauseStatus s) const {
    return static_cast<std::size_t>(std::count_if(clauses.begin(), clauses.end(), [s](const Clause& c) { return c.status == s; }));
  }
};

/// Structural clauses (a), (b), divisibility, l_{j+1} = l_j N_j, and the magnitude inequalities
/// (exact mode only). Magnitudes for the level after the last built one come from the formula.
inline ClauseReport verify_level_invariants(const JlpFamily& fam) {
  ClauseReport rep;
  const auto& L = fam.levels();
  const auto& p = fam.params();
  if (L.size() < 2) throw PreconditionError("need at least two levels");
  for (const auto& lv : L) {
    std::string j = std::to_string(lv.j);
    rep.add("(i) 3 | N_" + j + ", 3 | l_" + j, lv.N % 3 == 0 && lv.l % 3 == 0);
    // (a): common prefix and suffix of length l_j / 3
    const std::int64_t third = lv.l / 3;
    Word pre = fam.extract(lv.j, 0, 0, third), suf = fam.extract(lv.j, 0, lv.l - third, third);
    bool a = true;
    for (std::int64_t i = 1; i < lv.N && a; ++i)
      a = fam.extract(lv.j, i, 0, third) == pre && fam.extract(lv.j, i, lv.l - third, third) == suf;
    rep.add("(a) common prefix/suffix in C_" + j, a);
    if (lv.j == 0) {
      std::unordered_set<Word> distinct(lv.words.begin(), lv.words.end());
      rep.add("C_0 members distinct", static_cast<std::int64_t>(distinct.size()) == lv.N);
      continue;
    }
    const auto& prev = L[static_cast<std::size_t>(lv.j - 1)];
    // (b): each member's blocks are every member of C_{j-1} exactly once
    bool b = static_cast<std::int64_t>(lv.perms.size()) == lv.N;
    for (std::int64_t i = 0; i < lv.N && b; ++i) {
      std::vector<std::uint8_t> hit(static_cast<std::size_t>(prev.N), 0);
      for (std::int64_t t = 0; t < prev.N; ++t) {
        auto c = fam.child(lv.j, i, t);
        if (c < 0 || c >= prev.N || hit[static_cast<std::size_t>(c)]) {
          b = false;
          break;
        }
        hit[static_cast<std::size_t>(c)] = 1;
      }
    }
    rep.add("(b) C_" + j + " members are products of all of C_" + std::to_string(prev.j), b);
    rep.add("l_" + j + " = l_" + std::to_string(prev.j) + " N_" + std::to_string(prev.j), lv.l == prev.l * prev.N);
    bool distinct = std::adjacent_find(lv.perms.begin(), lv.perms.end()) == lv.perms.end();
    rep.add("P_" + std::to_string(prev.j) + " distinct", distinct);
  }
  if (p.toy()) {
    rep.skip("(ii) magnitudes", "toy mode");
    rep.skip("(iii) magnitudes", "toy mode");
    return rep;
  }
  // log N_j for j = 0..J, then the formula value for J+1
  std::vector<double> logN;
  std::vector<double> logl;
  for (const auto& lv : L) {
    logN.push_back(std::log(static_cast<double>(lv.N)));
    logl.push_back(std::log(static_cast<double>(lv.l)));
  }
  const std::size_t J = L.size() - 1;
  logl.push_back(logl[J] + logN[J]);
  logN.push_back(detail::log_collection_size(p.r, L[J].N, static_cast<int>(J)));
  const double r = p.r;
  const double tol = 1e-9;
  auto tag = [&](std::size_t j) { return j > J ? " (formula)" : ""; };
  for (std::size_t j = 0; j + 1 < logN.size(); ++j) {
    std::string s = std::to_string(j), s1 = std::to_string(j + 1);
    rep.add("(ii) N_" + s1 + " >= N_" + s + "^2" + tag(j + 1), logN[j + 1] + tol >= 2 * logN[j]);
    if (j % 2 == 0)
      rep.add("(ii) N_" + s1 + " >= exp((log N_" + s + ")^r / 2)" + tag(j + 1),
              logN[j + 1] + tol >= std::pow(logN[j], r) / 2);
    if (j + 2 < logN.size())
      rep.add("(ii) N_" + std::to_string(j + 2) + " <= exp(2^r (log N_" + s + ")^r)" + tag(j + 2),
              logN[j + 2] <= std::pow(2.0, r) * std::pow(logN[j], r) + tol);
    // (iii) N_j < l_{j+1} <= N_j^2
    if (j + 1 < logl.size())
      rep.add("(iii) N_" + s + " < l_" + s1 + " <= N_" + s + "^2" + tag(j + 1),
              logN[j] < logl[j + 1] - tol && logl[j + 1] <= 2 * logN[j] + tol);
  }
  return rep;
}

/// x^{(j)} = u^{(j)}_{N_j/3}; anchored at K_j = l_j (N_j/3 - 1) + 1 inside x^{(j+1)}.
inline std::shared_ptr<LimitWordSource> jlp_word_source(std::shared_ptr<const JlpFamily> fam, std::int64_t M0 = 1) {
  const auto& L = fam->levels();
  if (L.size() < 2) throw PreconditionError("need at least two levels");
  std::vector<LimitLevel> lv;
  std::vector<std::int64_t> ks;
  for (const auto& level : L) {
    const int j = level.j;
    const std::int64_t idx = level.N / 3 - 1;
    lv.push_back({level.l, [fam, j, idx](std::int64_t pos, std::int64_t len) { return fam->extract(j, idx, pos, len); }});
    ks.push_back(level.l * (level.N / 3 - 1) + 1);
  }
  ks.pop_back();
  const std::size_t J = L.size() - 1;
  // factors this short sit inside two consecutive top-minus-one blocks, all of which x^{(J)} shows
  std::size_t bound = static_cast<std::size_t>(L[J - 1].l / 3 + 1);
  if (J >= 2) bound = std::max(bound, static_cast<std::size_t>(L[J - 2].l + 1));
  const auto& p = fam->params();
  std::string desc = "jlp;ab;r=" + format_real(p.r) + ";x=" + std::to_string(p.x) + ";levels=" + std::to_string(p.levels) +
                     ";seed=" + std::to_string(p.seed) + (p.toy_cap ? ";cap=" + std::to_string(*p.toy_cap) : "") +
                     ";M0=" + std::to_string(M0);
  return std::make_shared<LimitWordSource>(Alphabet("ab"), std::move(lv), std::move(ks), M0, SourceKind::jlp, bound, desc);
}

/// p(l_j) >= N_j by scanning x^{(j+1)} for the members of C_j; exponential clause for odd j in exact mode.
inline ClauseReport check_complexity_lb(const JlpFamily& fam) {
  ClauseReport rep;
  const auto& L = fam.levels();
  for (std::size_t j = 0; j + 1 < L.size(); ++j) {
    const auto& lv = L[j];
    const auto& up = L[j + 1];
    std::string s = std::to_string(j);
    if (static_cast<std::size_t>(up.l) > 200'000'000) {
      rep.skip("p(l_" + s + ") >= N_" + s, "scan budget");
      continue;
    }
    Word text = fam.expand(static_cast<int>(j + 1), up.N / 3 - 1);
    std::unordered_set<std::string_view> members;
    std::vector<Word> words;
    if (j == 0) {
      words = lv.words;
    } else {
      for (std::int64_t i = 0; i < lv.N; ++i) words.push_back(fam.expand(static_cast<int>(j), i));
    }
    for (const auto& w : words) members.insert(w);
    std::unordered_set<std::string_view> found;
    std::string_view sv(text);
    for (std::size_t k = 0; k + static_cast<std::size_t>(lv.l) <= sv.size(); ++k) {
      auto f = sv.substr(k, static_cast<std::size_t>(lv.l));
      if (members.count(f)) found.insert(f);
    }
    rep.add("p(l_" + s + ") >= N_" + s + " (scan)", static_cast<std::int64_t>(found.size()) >= lv.N,
            std::to_string(found.size()) + " of " + std::to_string(lv.N) + " members found");
  }
  if (fam.params().toy()) {
    rep.skip("exponential lower bound", "toy mode");
    return rep;
  }
  const double r = fam.params().r;
  for (std::size_t j = 1; j < L.size(); j += 2) {
    double lhs = std::log(static_cast<double>(L[j].N));
    double rhs = std::pow(std::log(static_cast<double>(L[j].l)), r) / std::pow(2.0, r + 1);
    rep.add("N_" + std::to_string(j) + " >= exp((log l_" + std::to_string(j) + ")^r / 2^(r+1))", lhs + 1e-9 >= rhs);
  }
  return rep;
}

struct RecurrenceScan {
  std::vector<std::pair<std::size_t, std::size_t>> values;  // (n, scanned R)
  ClauseReport report;
};

/// R(n) <= 3 l_{j+1} on [2 l_{j-1} / 3, 2 l_j / 3) (j = 0 starts at n = 1), scanned over x^{(J)}.
inline RecurrenceScan check_recurrence_ub(const JlpFamily& fam, const LimitWordSource& src, int j, std::size_t budget) {
  RecurrenceScan out;
  const auto& L = fam.levels();
  if (j < 0 || static_cast<std::size_t>(j) + 1 >= L.size()) throw PreconditionError("level out of range");
  const auto sp = *src.span();
  if (static_cast<std::size_t>(sp.hi - sp.lo + 1) > budget) {
    out.report.skip("R(n) <= 3 l_" + std::to_string(j + 1), "scan budget");
    return out;
  }
  Word text = src.window(sp.lo, sp.hi);
  const std::size_t lo = j == 0 ? 1 : static_cast<std::size_t>((2 * L[static_cast<std::size_t>(j - 1)].l + 2) / 3);
  const std::size_t hi = static_cast<std::size_t>((2 * L[static_cast<std::size_t>(j)].l + 2) / 3);  // exclusive
  const std::size_t bound = 3 * static_cast<std::size_t>(L[static_cast<std::size_t>(j + 1)].l);
  bool ok = true, monotone = true;
  std::size_t skipped_from = 0;
  for (std::size_t n = lo; n < hi; ++n) {
    auto fs = src.exact_factors(n);
    if (!fs) {
      if (!skipped_from) skipped_from = n;
      continue;
    }
    FactorIndex index(*fs);
    auto r = window_recurrence(text, index);
    std::size_t v = r ? *r : text.size() + 1;
    if (!out.values.empty() && v < out.values.back().second) monotone = false;
    out.values.emplace_back(n, v);
    ok = ok && v <= bound;
  }
  const std::size_t top = out.values.empty() ? lo : out.values.back().first + 1;
  out.report.add("scanned R(n) <= 3 l_" + std::to_string(j + 1) + " for n in [" + std::to_string(lo) + ", " +
                     std::to_string(top) + ")",
                 ok && !out.values.empty());
  if (skipped_from)
    out.report.skip("R(n) for n in [" + std::to_string(skipped_from) + ", " + std::to_string(hi) + ")",
                    "factor sets not certified");
  out.report.add("scanned R nondecreasing", monotone);
  if (!fam.params().toy() && j >= 1) {
    const double r = fam.params().r;
    double n0 = static_cast<double>(lo);
    double lhs = std::log(static_cast<double>(bound)) - std::log(3.0);
    out.report.add("log R(n) - log 3 <= 4^(r+1) (log n)^r at n = " + std::to_string(lo),
                   lhs <= std::pow(4.0, r + 1) * std::pow(std::log(n0), r));
  }
  return out;
}

}  // namespace lefg

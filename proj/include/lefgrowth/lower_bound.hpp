#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clopen.hpp"
#include "error.hpp"
#include "growth_table.hpp"
#include "quotient.hpp"
#include "subshift.hpp"
#include "tfg.hpp"

namespace lefg {

/// log(60)/9.
inline double lower_bound_constant() { return std::log(60.0) / 9.0; }

/// (R(4) - 1) / 2, the least radius at which the five shifts of a cylinder separate.
inline double disjointness_radius(const Subshift& ss) { return (static_cast<double>(ss.recurrence(4)) - 1.0) / 2.0; }

/// C_0 = ceil((R(4) - 1) / 2) + 1.
inline int compute_C0(const Subshift& ss) {
  auto r4 = static_cast<int>(ss.recurrence(4));
  return (r4 - 1 + 1) / 2 + 1;
}

/// sigma^i(U), -2 <= i <= 2, pairwise disjoint.
inline bool check_disjoint(const Subshift& ss, const CenteredWord& u) {
  auto cyl = ClopenSet::cylinder(ss, u);
  if (cyl.empty()) throw PreconditionError("'" + u.word + "' is not a cylinder of X");
  return five_disjoint(cyl);
}

struct DisjointCylinderFamily {
  int m = 0;
  std::vector<CenteredWord> members;
  std::size_t covered = 0;  // (m-4)-cylinders in the final cover A
};

/// The A_k / B_k iteration with lexicographic choice of the next uncovered cylinder.
inline DisjointCylinderFamily greedy_dcyl(const Subshift& ss, int m) {
  if (m < 5 || 2.0 * m < static_cast<double>(ss.recurrence(4)) - 1.0)
    throw PreconditionError("greedy_dcyl needs m >= max((R(4)-1)/2, 5); got m = " + std::to_string(m));
  const auto& cyl = ss.level(m);
  const auto& coarse = ss.level(m - 4);
  std::vector<std::uint8_t> in_a(static_cast<std::size_t>(coarse.size()), 0);
  DisjointCylinderFamily fam;
  fam.m = m;
  const auto len = static_cast<std::size_t>(2 * m - 7);
  for (const auto& w : cyl.words) {
    auto centre = coarse.id(std::string_view(w).substr(4, len));
    if (in_a[static_cast<std::size_t>(centre)]) continue;
    fam.members.emplace_back(w);
    // (m-4)-cylinder containing sigma^j(U) starts at offset 4 + j
    for (std::size_t off = 0; off <= 8; ++off) {
      auto id = coarse.id(std::string_view(w).substr(off, len));
      if (id < 0) throw ConsistencyError("coarsening of a cylinder is not a cylinder");
      in_a[static_cast<std::size_t>(id)] = 1;
    }
  }
  fam.covered = static_cast<std::size_t>(std::count(in_a.begin(), in_a.end(), 1));
  if (fam.covered != static_cast<std::size_t>(coarse.size()))
    throw ConsistencyError("greedy cover left (m-4)-cylinders uncovered");
  return fam;
}

/// Exhaustive pairwise disjointness of all sigma^i(U), U in the family, |i| <= 2.
inline bool verify_family(const Subshift& ss, const DisjointCylinderFamily& fam) {
  const int q = fam.m + 2;
  const auto& lv = ss.level(q);
  std::vector<std::int32_t> owner(static_cast<std::size_t>(lv.size()), -1);
  std::int32_t tag = 0;
  for (const auto& u : fam.members) {
    auto cyl = ClopenSet::cylinder(ss, u);
    for (int i = -2; i <= 2; ++i, ++tag) {
      auto s = cyl.shifted(i).refined(q);
      for (std::int32_t k = 0; k < lv.size(); ++k)
        if (s.contains_id(k)) {
          if (owner[static_cast<std::size_t>(k)] >= 0) return false;
          owner[static_cast<std::size_t>(k)] = tag;
        }
    }
  }
  return true;
}

struct BaseSetOptions {
  std::optional<int> m_lo, m_hi;  // defaults: C0 .. 2 C0
};

inline std::string generator_name(const std::string& kind, const Word& w) { return kind + "[" + w + "]"; }

/// f_{sigma^i W} (i = -1, 0, 1) and h_W for every m-cylinder W, C0 <= m <= 2 C0.
inline GeneratorSet base_generating_set(const Subshift& ss, int C0, BaseSetOptions opt = {}) {
  if (C0 < 1 || 2.0 * C0 < static_cast<double>(ss.recurrence(4)) - 1.0)
    throw PreconditionError("C0 below the disjointness radius");
  int lo = opt.m_lo.value_or(C0), hi = opt.m_hi.value_or(2 * C0);
  if (lo < C0 || hi > 2 * C0 || lo > hi) throw PreconditionError("base range must lie inside [C0, 2 C0]");
  GeneratorSet s(ss);
  for (int m = lo; m <= hi; ++m) {
    for (const auto& w : ss.level(m).words) {
      CenteredWord u(w);
      try {
        s.add(generator_name("f-1", w), make_fU(ss, u, -1));
        s.add(generator_name("f0", w), make_fU(ss, u, 0));
        s.add(generator_name("f+1", w), make_fU(ss, u, 1));
        s.add(generator_name("h", w), make_hU(ss, u));
      } catch (const PreconditionError& e) {
        throw ConsistencyError("base generator for '" + w + "' failed: " + e.what());
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Words in S

struct SLetter {
  std::int32_t generator = 0;
  bool inverse = false;
  bool operator==(const SLetter&) const = default;
};

struct SWord {
  std::vector<SLetter> letters;

  std::size_t length() const noexcept { return letters.size(); }

  SWord inverted() const {
    SWord out;
    out.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) out.letters.push_back({it->generator, !it->inverse});
    return out;
  }

  SWord& operator+=(const SWord& o) {
    letters.insert(letters.end(), o.letters.begin(), o.letters.end());
    return *this;
  }

  std::string to_string(const GeneratorSet& s) const {
    std::string out;
    for (const auto& l : letters) {
      if (!out.empty()) out += ' ';
      out += s.names().at(static_cast<std::size_t>(l.generator));
      if (l.inverse) out += "^-1";
    }
    return out;
  }
};

inline SWord operator+(SWord a, const SWord& b) {
  a += b;
  return a;
}

/// Evaluates words with cached generator inverses.
class WordEvaluator {
public:
  explicit WordEvaluator(const GeneratorSet& s) : s_(&s), inv_(s.size()) {}

  const TfgElement& letter(const SLetter& l) const {
    const auto g = static_cast<std::size_t>(l.generator);
    if (!l.inverse) return (*s_)[g];
    if (!inv_[g]) inv_[g] = inverse((*s_)[g]);
    return *inv_[g];
  }

  TfgElement operator()(const SWord& w) const {
    TfgElement acc = TfgElement::identity(s_->subshift());
    for (const auto& l : w.letters) acc = compose(acc, letter(l));
    return acc;
  }

private:
  const GeneratorSet* s_;
  mutable std::vector<std::optional<TfgElement>> inv_;
};

inline TfgElement evaluate_word(const GeneratorSet& s, const SWord& w) { return WordEvaluator(s)(w); }

/// Short words for f_{sigma^i W} via commutators and tau-ladders over a base set named as in
/// base_generating_set. Memoizes every cylinder it visits.
class FWordBuilder {
public:
  FWordBuilder(const Subshift& ss, const GeneratorSet& s, int C0, int max_depth = 16)
      : ss_(&ss), s_(&s), C0_(C0), max_depth_(max_depth) {
    for (std::size_t i = 0; i < s.size(); ++i) by_name_.emplace(s.names()[i], static_cast<std::int32_t>(i));
  }

  int C0() const noexcept { return C0_; }

  /// Word for f_{sigma^i(W)}, i in {-1, 0, 1}.
  const SWord& word(const CenteredWord& w, int i = 0) { return build(w, i, 0); }

private:
  SWord single(const std::string& kind, const Word& w) const {
    auto it = by_name_.find(generator_name(kind, w));
    if (it == by_name_.end()) throw PreconditionError("generator set lacks " + generator_name(kind, w));
    return SWord{{SLetter{it->second, false}}};
  }

  static const char* kind_for(int i) { return i < 0 ? "f-1" : (i > 0 ? "f+1" : "f0"); }

  /// tau_V for a C0-cylinder V.
  SWord tau(const Word& v) const { return single("f-1", v) + single("f+1", v); }

  const SWord& build(const CenteredWord& w, int i, int depth) {
    auto key = std::make_pair(w.word, i);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (depth > max_depth_) throw BudgetError("f_W recursion exceeds depth " + std::to_string(max_depth_));
    const int m = w.radius();
    SWord out;
    if (ss_->level(m).id(w.word) < 0) throw PreconditionError("'" + w.word + "' is not a cylinder of X");
    if (m < C0_) {
      // disjoint refinement into C0-cylinders; their f's commute
      if (2.0 * m < static_cast<double>(ss_->recurrence(4)) - 1.0)
        throw PreconditionError("f_W words need m >= (R(4)-1)/2");
      const int d = C0_ - m;
      for (const auto& v : ss_->level(C0_).words)
        if (v.compare(static_cast<std::size_t>(d), w.word.size(), w.word) == 0) out += build(CenteredWord(v), i, depth + 1);
    } else if (m <= 2 * C0_) {
      out = single(kind_for(i), w.word);
    } else if (i != 0) {
      const Word outer = w.coarsened(C0_).word;
      const SWord& fw = build(w, 0, depth);
      out = i > 0 ? tau(outer) + fw + tau(outer).inverted() : tau(outer).inverted() + fw + tau(outer);
    } else {
      const int C = (m + C0_) % 2 == 0 ? C0_ : C0_ - 1;
      const int half = (m + C) / 2;
      const int s = (m - C - 2) / 2;
      // sigma^{-s}(U) and sigma^{s}(V) are the centred half-size cylinders below
      const Word zu = w.word.substr(0, static_cast<std::size_t>(m + C + 1));
      const Word zv = w.word.substr(static_cast<std::size_t>(m - C));
      SWord fu = build(CenteredWord(zu), 0, depth + 1);
      SWord fv = build(CenteredWord(zv), 0, depth + 1);
      auto ladder_word = [&](const Word& z, int t) {
        return z.substr(static_cast<std::size_t>(half + t - C0_), static_cast<std::size_t>(2 * C0_ + 1));
      };
      for (int k = s; k >= 1; --k) {
        auto t = tau(ladder_word(zu, s - k));
        fu = t + fu + t.inverted();
        auto tv = tau(ladder_word(zv, k - s));
        fv = tv.inverted() + fv + tv;
      }
      out = fv + fu.inverted() + fv.inverted() + fu;
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  const Subshift* ss_;
  const GeneratorSet* s_;
  int C0_;
  int max_depth_;
  std::unordered_map<std::string, std::int32_t> by_name_;
  std::map<std::pair<Word, int>, SWord> memo_;
};

inline SWord build_fW_word(const Subshift& ss, const GeneratorSet& s, const CenteredWord& w, int C0, int i = 0) {
  FWordBuilder b(ss, s, C0);
  return b.word(w, i);
}

// ---------------------------------------------------------------------------
// Alt(5) blocks

/// Delta_U = <f_{sigma^-1 U}, f_U, f_{sigma U}>, acting on the blocks sigma^{-2}U .. sigma^2 U.
struct Alt5Block {
  CenteredWord U;
  std::array<TfgElement, 3> generators;
  std::array<SWord, 3> words;
  ClopenSet support;                  // union of sigma^i(U), |i| <= 2
  std::vector<TfgElement> elements;   // all of Delta_U, BFS order from the identity
  std::vector<SWord> element_words;   // S-words for each element
  std::vector<int> block_distance;    // word length in the three block generators
  std::size_t max_word_length = 0;
};

namespace detail {

/// Block permutation induced by g on sigma^{-2}U .. sigma^2 U, or empty if g does not permute them.
inline std::optional<std::array<int, 5>> block_action(const TfgElement& g, const std::vector<ClopenSet>& blocks,
                                                      const ClopenSet& outside) {
  int q = std::max(g.precision(), blocks.front().precision());
  for (const auto& b : blocks) q = std::max(q, b.precision());
  auto t = g.table_at(q);
  std::array<int, 5> perm{};
  for (int j = 0; j < 5; ++j) {
    auto b = blocks[static_cast<std::size_t>(j)].refined(q);
    std::optional<int> shift;
    for (std::int32_t k = 0; k < static_cast<std::int32_t>(t.size()); ++k) {
      if (!b.contains_id(k)) continue;
      int a = t[static_cast<std::size_t>(k)];
      if (shift && *shift != a) return std::nullopt;
      shift = a;
    }
    if (!shift || j + *shift < 0 || j + *shift > 4) return std::nullopt;
    perm[static_cast<std::size_t>(j)] = j + *shift;
  }
  auto o = outside.refined(q);
  for (std::int32_t k = 0; k < static_cast<std::int32_t>(t.size()); ++k)
    if (o.contains_id(k) && t[static_cast<std::size_t>(k)] != 0) return std::nullopt;
  return perm;
}

}  // namespace detail

inline Alt5Block build_delta_U(const Subshift& ss, FWordBuilder& builder, const WordEvaluator& eval, const CenteredWord& u) {
  Alt5Block blk;
  blk.U = u;
  auto cyl = ClopenSet::cylinder(ss, u);
  if (!five_disjoint(cyl)) throw PreconditionError("shifts of '" + u.word + "' are not pairwise disjoint");
  std::vector<ClopenSet> blocks;
  for (int i = -2; i <= 2; ++i) blocks.push_back(cyl.shifted(i).refined(u.radius() + 2));
  blk.support = blocks[0];
  for (std::size_t j = 1; j < 5; ++j) blk.support = blk.support.unite(blocks[j]);
  auto whole = ClopenSet(ss, blk.support.precision(), std::vector<std::uint8_t>(blk.support.members().size(), 1));
  auto outside = whole.minus(blk.support);

  // generator i-1 should cycle blocks (i-1, i, i+1) in the -2..2 labelling
  for (int i = 0; i < 3; ++i) {
    blk.words[static_cast<std::size_t>(i)] = builder.word(u, i - 1);
    blk.generators[static_cast<std::size_t>(i)] = eval(blk.words[static_cast<std::size_t>(i)]);
    if (blk.generators[static_cast<std::size_t>(i)] != make_fU(ss, u, i - 1))
      throw ConsistencyError("word for f_{sigma^" + std::to_string(i - 1) + "(U)} evaluates to another element");
    auto act = detail::block_action(blk.generators[static_cast<std::size_t>(i)], blocks, outside);
    std::array<int, 5> want{0, 1, 2, 3, 4};
    want[static_cast<std::size_t>(i)] = i + 1;
    want[static_cast<std::size_t>(i + 1)] = i + 2;
    want[static_cast<std::size_t>(i + 2)] = i;
    if (!act || *act != want) throw ConsistencyError("block generator does not act as the expected 3-cycle");
  }

  std::unordered_map<TfgElement, std::size_t, TfgHash> seen;
  blk.elements.push_back(TfgElement::identity(ss));
  blk.element_words.emplace_back();
  blk.block_distance.push_back(0);
  seen.emplace(blk.elements[0], 0);
  for (std::size_t k = 0; k < blk.elements.size(); ++k) {
    for (int i = 0; i < 3; ++i)
      for (bool inv : {false, true}) {
        const auto& gi = blk.generators[static_cast<std::size_t>(i)];
        auto g = compose(inv ? inverse(gi) : gi, blk.elements[k]);
        if (seen.count(g)) continue;
        if (blk.elements.size() >= 60) throw ConsistencyError("block group is larger than 60");
        const auto& wi = blk.words[static_cast<std::size_t>(i)];
        blk.element_words.push_back((inv ? wi.inverted() : wi) + blk.element_words[k]);
        blk.block_distance.push_back(blk.block_distance[k] + 1);
        seen.emplace(g, blk.elements.size());
        blk.elements.push_back(std::move(g));
      }
  }
  if (blk.elements.size() != 60) throw ConsistencyError("block group has order " + std::to_string(blk.elements.size()));
  for (const auto& g : blk.elements) {
    if (!support(g).subset_of(blk.support)) throw ConsistencyError("block element moves points outside its five blocks");
    auto act = detail::block_action(g, blocks, outside);
    if (!act) throw ConsistencyError("block element does not permute the blocks");
    int inversions = 0;
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b)
        if ((*act)[static_cast<std::size_t>(a)] > (*act)[static_cast<std::size_t>(b)]) ++inversions;
    if (inversions % 2) throw ConsistencyError("block element acts as an odd permutation");
  }
  for (const auto& w : blk.element_words) blk.max_word_length = std::max(blk.max_word_length, w.length());
  return blk;
}

inline Alt5Block build_delta_U(const Subshift& ss, const GeneratorSet& s, const CenteredWord& u, int C0) {
  FWordBuilder b(ss, s, C0);
  WordEvaluator e(s);
  return build_delta_U(ss, b, e, u);
}

struct ObstructionReport {
  std::size_t k = 0;
  double log_order_lower = 0;  // k log 60
  double log_order_upper = 0;  // log M!
  std::size_t max_element_length = 0;
};

/// Pushes disjoint Alt(5) blocks through a certified embedding and checks they generate
/// a direct product inside Sym(M).
inline ObstructionReport direct_product_obstruction(const std::vector<Alt5Block>& blocks, const PermutationQuotient& q,
                                                    const LocalEmbeddingCertificate& cert) {
  if (blocks.empty()) throw PreconditionError("no blocks");
  ObstructionReport rep;
  rep.k = blocks.size();
  std::vector<std::vector<const Perm*>> img(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& g : blocks[b].elements) {
      auto id = cert.ball.find(g);
      if (id < 0) throw PreconditionError("block element lies outside the certified ball");
      rep.max_element_length = std::max(rep.max_element_length, static_cast<std::size_t>(cert.ball.length[static_cast<std::size_t>(id)]));
      img[b].push_back(&cert.images[static_cast<std::size_t>(id)]);
    }
  }
  if (static_cast<std::size_t>(cert.ball_radius) < 2 * rep.max_element_length)
    throw PreconditionError("certificate radius is below twice the block element length");

  const std::size_t D = cert.domain.size();
  std::vector<std::vector<std::uint8_t>> moved(blocks.size(), std::vector<std::uint8_t>(D, 0));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::unordered_set<std::string> distinct;
    for (const auto* p : img[b]) {
      distinct.emplace(reinterpret_cast<const char*>(p->data()), p->size() * sizeof(std::int32_t));
      for (std::size_t t = 0; t < D; ++t)
        if ((*p)[t] != static_cast<std::int32_t>(t)) moved[b][t] = 1;
    }
    if (distinct.size() != 60) throw CertificateFailure("block image does not have order 60");
    for (const auto* p : img[b])
      for (const auto* r : img[b]) {
        auto c = compose_perm(*p, *r);
        if (!distinct.count(std::string(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(std::int32_t))))
          throw CertificateFailure("block image is not closed under composition");
      }
  }
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      for (std::size_t t = 0; t < D; ++t)
        if (moved[a][t] && moved[b][t]) throw CertificateFailure("block images move a common point");
      for (const auto* p : img[a])
        for (const auto* r : img[b])
          if (compose_perm(*p, *r) != compose_perm(*r, *p)) throw CertificateFailure("block images do not commute");
    }
  rep.log_order_lower = static_cast<double>(rep.k) * std::log(60.0);
  rep.log_order_upper = log_factorial(q.M);
  if (rep.log_order_lower > rep.log_order_upper) throw CertificateFailure("60^k exceeds M!");
  return rep;
}

struct LowerGrowth {
  GrowthTable table{Meaning::lower_bound_exponent};
  std::vector<int> m_values;          // m producing each row
  std::vector<std::size_t> family_sizes;
};

/// Rows (r(m), c p(2m-7)), r(m) = 2 * longest block element word. Equal radii keep the larger bound.
inline LowerGrowth growth_lower_datapoints(const Subshift& ss, const GeneratorSet& s, int C0, std::vector<int> m_list) {
  if (m_list.empty()) throw PreconditionError("empty m list");
  std::sort(m_list.begin(), m_list.end());
  m_list.erase(std::unique(m_list.begin(), m_list.end()), m_list.end());
  FWordBuilder builder(ss, s, C0);
  WordEvaluator eval(s);
  const double c = lower_bound_constant();
  std::map<std::int64_t, std::tuple<double, int, std::size_t>> rows;
  for (int m : m_list) {
    auto fam = greedy_dcyl(ss, m);
    std::size_t longest = 0;
    for (const auto& u : fam.members) longest = std::max(longest, build_delta_U(ss, builder, eval, u).max_word_length);
    auto r = static_cast<std::int64_t>(2 * longest);
    double v = c * static_cast<double>(ss.complexity(static_cast<std::size_t>(2 * m - 7)));
    auto it = rows.find(r);
    if (it == rows.end() || std::get<0>(it->second) < v) rows[r] = {v, m, fam.members.size()};
  }
  LowerGrowth out;
  for (auto& [r, row] : rows) {
    out.table.add(r, std::get<0>(row), true);
    out.m_values.push_back(std::get<1>(row));
    out.family_sizes.push_back(std::get<2>(row));
  }
  return out;
}

}  // namespace lefg

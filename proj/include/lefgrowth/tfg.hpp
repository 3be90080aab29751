#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clopen.hpp"
#include "error.hpp"
#include "subshift.hpp"
#include "word.hpp"

namespace lefg {

/// Outcome of the bijectivity test for a cylinder -> shift table.
struct ValidityCertificate {
  bool valid = false;
  int checked_precision = 0;        // precision of the cylinders examined
  std::size_t cylinders_checked = 0;
  std::string witness;              // a cylinder with zero or several preimages
  int preimages_at_witness = 0;
};

/// An element g of the topological full group, stored as its orbit cocycle f_g:
/// g(y) = sigma^{f_g(y)}(y), with f_g constant on m-cylinders.
/// Tables are always kept at the least precision on which f_g is constant.
class TfgElement {
public:
  TfgElement() = default;

  static TfgElement identity(const Subshift& ss) {
    return TfgElement(ss, 0, std::vector<std::int32_t>(static_cast<std::size_t>(ss.level(0).size()), 0));
  }

  /// Builds from an arbitrary table; rejects tables that are not homeomorphisms.
  static TfgElement from_table(const Subshift& ss, int precision, std::vector<std::int32_t> table) {
    if (static_cast<std::int32_t>(table.size()) != ss.level(precision).size())
      throw PreconditionError("table must be total on the cylinders of its precision");
    auto cert = check_valid(ss, precision, table);
    if (!cert.valid)
      throw PreconditionError("table is not a bijection: cylinder '" + cert.witness + "' has " +
                              std::to_string(cert.preimages_at_witness) + " preimages");
    return TfgElement(ss, precision, std::move(table));
  }

  /// Trusted constructor: table known to come from a group element.
  TfgElement(const Subshift& ss, int precision, std::vector<std::int32_t> table)
      : ss_(&ss), precision_(precision), table_(std::move(table)) {
    canonicalize();
  }

  const Subshift& subshift() const { return *ss_; }
  int precision() const noexcept { return precision_; }
  const std::vector<std::int32_t>& table() const noexcept { return table_; }
  int lambda() const noexcept { return lambda_; }
  std::size_t hash() const noexcept { return hash_; }
  bool is_identity() const noexcept { return lambda_ == 0; }

  /// f_g on the cylinder named by a centred word of radius >= precision().
  int shift_on(std::string_view centred) const {
    int r = static_cast<int>(centred.size() / 2);
    if (r < precision_) throw PreconditionError("centred word shorter than the element's precision");
    auto id = ss_->level(precision_).id(centred.substr(static_cast<std::size_t>(r - precision_),
                                                       static_cast<std::size_t>(2 * precision_ + 1)));
    if (id < 0) throw PreconditionError("'" + std::string(centred) + "' is not a cylinder of X");
    return table_[static_cast<std::size_t>(id)];
  }

  /// The table at a finer precision q.
  std::vector<std::int32_t> table_at(int q) const {
    if (q < precision_) throw PreconditionError("cannot coarsen below the canonical precision");
    if (q == precision_) return table_;
    const auto& proj = ss_->projection(q, precision_, 0);
    std::vector<std::int32_t> out(proj.size());
    for (std::size_t i = 0; i < proj.size(); ++i) out[i] = table_[static_cast<std::size_t>(proj[i])];
    return out;
  }

  bool operator==(const TfgElement& o) const {
    return ss_ == o.ss_ && hash_ == o.hash_ && precision_ == o.precision_ && table_ == o.table_;
  }
  bool operator!=(const TfgElement& o) const { return !(*this == o); }

  static ValidityCertificate check_valid(const Subshift& ss, int precision, const std::vector<std::int32_t>& table) {
    int lam = 0;
    for (auto a : table) lam = std::max(lam, std::abs(a));
    ValidityCertificate cert;
    cert.checked_precision = precision + lam;
    const int q = precision + lam;
    const auto& lv = ss.level(q);
    std::vector<const std::vector<std::int32_t>*> proj(static_cast<std::size_t>(2 * lam + 1));
    for (int b = -lam; b <= lam; ++b) proj[static_cast<std::size_t>(b + lam)] = &ss.projection(q, precision, b);
    cert.cylinders_checked = static_cast<std::size_t>(lv.size());
    // y has a preimage sigma^b y exactly when f(sigma^b y) = -b
    for (std::int32_t u = 0; u < lv.size(); ++u) {
      int hits = 0;
      for (int b = -lam; b <= lam; ++b)
        if (table[static_cast<std::size_t>((*proj[static_cast<std::size_t>(b + lam)])[static_cast<std::size_t>(u)])] == -b)
          ++hits;
      if (hits != 1) {
        cert.witness = lv.words[static_cast<std::size_t>(u)];
        cert.preimages_at_witness = hits;
        return cert;
      }
    }
    cert.valid = true;
    return cert;
  }

private:
  bool constant_at(int p) const {
    const auto& proj = ss_->projection(precision_, p, 0);
    std::vector<std::int32_t> seen(static_cast<std::size_t>(ss_->level(p).size()), INT32_MIN);
    for (std::size_t i = 0; i < proj.size(); ++i) {
      auto& s = seen[static_cast<std::size_t>(proj[i])];
      if (s == INT32_MIN)
        s = table_[i];
      else if (s != table_[i])
        return false;
    }
    return true;
  }

  void canonicalize() {
    int lo = 0, hi = precision_;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (constant_at(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    if (lo < precision_) {
      const auto& proj = ss_->projection(precision_, lo, 0);
      std::vector<std::int32_t> t(static_cast<std::size_t>(ss_->level(lo).size()), 0);
      for (std::size_t i = 0; i < proj.size(); ++i) t[static_cast<std::size_t>(proj[i])] = table_[i];
      table_ = std::move(t);
      precision_ = lo;
    }
    lambda_ = 0;
    std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(precision_);
    for (auto a : table_) {
      lambda_ = std::max(lambda_, std::abs(a));
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(a));
      h *= 0x100000001b3ULL;
    }
    hash_ = static_cast<std::size_t>(h);
  }

  const Subshift* ss_ = nullptr;
  int precision_ = 0;
  std::vector<std::int32_t> table_;
  int lambda_ = 0;
  std::size_t hash_ = 0;
};

struct TfgHash {
  std::size_t operator()(const TfgElement& g) const noexcept { return g.hash(); }
};

namespace detail {
inline void same_subshift(const TfgElement& g, const TfgElement& h) {
  if (&g.subshift() != &h.subshift()) throw PreconditionError("elements live on different subshifts");
}
}  // namespace detail

/// g o h: f_{gh}(y) = f_h(y) + f_g(sigma^{f_h(y)} y).
inline TfgElement compose(const TfgElement& g, const TfgElement& h) {
  detail::same_subshift(g, h);
  const Subshift& ss = g.subshift();
  const int lh = h.lambda();
  const int m = std::max(h.precision(), g.precision() + lh);
  const auto& ph = ss.projection(m, h.precision(), 0);
  std::vector<const std::vector<std::int32_t>*> pg(static_cast<std::size_t>(2 * lh + 1), nullptr);
  std::vector<std::int32_t> out(ph.size());
  const auto& th = h.table();
  const auto& tg = g.table();
  for (std::size_t u = 0; u < ph.size(); ++u) {
    int a = th[static_cast<std::size_t>(ph[u])];
    auto& p = pg[static_cast<std::size_t>(a + lh)];
    if (!p) p = &ss.projection(m, g.precision(), a);
    out[u] = a + tg[static_cast<std::size_t>((*p)[u])];
  }
  return TfgElement(ss, m, std::move(out));
}

/// g^{-1}, computed at precision m + lambda before canonicalization.
inline TfgElement inverse(const TfgElement& g) {
  const Subshift& ss = g.subshift();
  const int lam = g.lambda();
  const int q = g.precision() + lam;
  const auto& lv = ss.level(q);
  std::vector<std::int32_t> out(static_cast<std::size_t>(lv.size()));
  std::vector<const std::vector<std::int32_t>*> proj(static_cast<std::size_t>(2 * lam + 1));
  for (int b = -lam; b <= lam; ++b) proj[static_cast<std::size_t>(b + lam)] = &ss.projection(q, g.precision(), b);
  const auto& t = g.table();
  for (std::int32_t u = 0; u < lv.size(); ++u) {
    int found = 0, hits = 0;
    for (int b = -lam; b <= lam; ++b)
      if (t[static_cast<std::size_t>((*proj[static_cast<std::size_t>(b + lam)])[static_cast<std::size_t>(u)])] == -b) {
        found = b;
        ++hits;
      }
    if (hits != 1) throw ConsistencyError("element is not invertible at cylinder '" + lv.words[static_cast<std::size_t>(u)] + "'");
    out[static_cast<std::size_t>(u)] = found;
  }
  return TfgElement(ss, q, std::move(out));
}

/// Product s_1 s_2 ... s_k (s_k acts first).
inline TfgElement product(const Subshift& ss, const std::vector<TfgElement>& factors) {
  TfgElement acc = TfgElement::identity(ss);
  for (const auto& f : factors) acc = compose(acc, f);
  return acc;
}

inline ValidityCertificate is_valid(const TfgElement& g) {
  return TfgElement::check_valid(g.subshift(), g.precision(), g.table());
}

/// phi(g)[n] = n + f_g(sigma^n x).
inline std::int64_t evaluate(const TfgElement& g, std::int64_t n) {
  const int m = g.precision();
  Word w = g.subshift().window(n - m, n + m);
  auto id = g.subshift().level(m).id(w);
  if (id < 0) throw ConsistencyError("window of x is not a cylinder of X");
  return n + g.table()[static_cast<std::size_t>(id)];
}

/// phi(g)[n] for n = lo..hi from one window fetch.
inline std::vector<std::int64_t> evaluate_range(const TfgElement& g, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) return {};
  const int m = g.precision();
  Word w = g.subshift().window(lo - m, hi + m);
  const auto& lv = g.subshift().level(m);
  std::vector<std::int64_t> out(static_cast<std::size_t>(hi - lo + 1));
  std::string_view sv(w);
  for (std::int64_t n = lo; n <= hi; ++n) {
    auto id = lv.id(sv.substr(static_cast<std::size_t>(n - lo), static_cast<std::size_t>(2 * m + 1)));
    if (id < 0) throw ConsistencyError("window of x is not a cylinder of X");
    out[static_cast<std::size_t>(n - lo)] = n + g.table()[static_cast<std::size_t>(id)];
  }
  return out;
}

/// supp(g) at the element's canonical precision.
using SupportSet = ClopenSet;

inline SupportSet support(const TfgElement& g) {
  std::vector<std::uint8_t> m(g.table().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.table()[i] != 0 ? 1 : 0;
  return ClopenSet(g.subshift(), g.precision(), std::move(m));
}

/// Builds an element from a rule on cylinders at precision q; trusted caller.
template <class Rule>
TfgElement element_from_rule(const Subshift& ss, int q, Rule rule) {
  std::vector<std::int32_t> t(static_cast<std::size_t>(ss.level(q).size()));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rule(static_cast<std::int32_t>(i));
  return TfgElement(ss, q, std::move(t));
}

/// f_Z: +1 on Z and sigma^{-1}Z, -2 on sigma Z. Needs those three sets pairwise disjoint.
inline TfgElement make_f(const ClopenSet& z) {
  if (z.empty()) throw PreconditionError("f_Z needs a nonempty set");
  auto before = z.shifted(-1), after = z.shifted(1);
  if (!pairwise_disjoint({before, z, after}))
    throw PreconditionError("sigma^-1(Z), Z, sigma(Z) are not pairwise disjoint");
  int q = std::max({before.precision(), z.precision(), after.precision()});
  auto b = before.refined(q), c = z.refined(q), a = after.refined(q);
  return element_from_rule(z.subshift(), q, [&](std::int32_t i) {
    if (b.contains_id(i) || c.contains_id(i)) return 1;
    if (a.contains_id(i)) return -2;
    return 0;
  });
}

/// h_Z: +1 on sigma^{-1}Z, -1 on Z. Needs the two disjoint.
inline TfgElement make_h(const ClopenSet& z) {
  if (z.empty()) throw PreconditionError("h_Z needs a nonempty set");
  auto before = z.shifted(-1);
  if (!before.disjoint(z)) throw PreconditionError("sigma^-1(Z) and Z are not disjoint");
  int q = std::max(before.precision(), z.precision());
  auto b = before.refined(q), c = z.refined(q);
  return element_from_rule(z.subshift(), q, [&](std::int32_t i) {
    if (b.contains_id(i)) return 1;
    if (c.contains_id(i)) return -1;
    return 0;
  });
}

/// sigma^i(U) for -2 <= i <= 2 pairwise disjoint.
inline bool five_disjoint(const ClopenSet& v) {
  std::vector<ClopenSet> s;
  for (int i = -2; i <= 2; ++i) s.push_back(v.shifted(i));
  return pairwise_disjoint(s);
}

/// f_{sigma^i(U)} for an m-cylinder U and i in {-1, 0, 1}.
inline TfgElement make_fU(const Subshift& ss, const CenteredWord& u, int i = 0) {
  if (i < -1 || i > 1) throw PreconditionError("shift selector must be -1, 0 or 1");
  auto cyl = ClopenSet::cylinder(ss, u);
  if (cyl.empty()) throw PreconditionError("'" + u.word + "' is not a cylinder of X");
  return make_f(cyl.shifted(i));
}

inline TfgElement make_hU(const Subshift& ss, const CenteredWord& u) {
  auto cyl = ClopenSet::cylinder(ss, u);
  if (cyl.empty()) throw PreconditionError("'" + u.word + "' is not a cylinder of X");
  return make_h(cyl);
}

/// tau_V = f_{sigma^{-1}V} f_{sigma V}.
inline TfgElement make_tau(const ClopenSet& v) {
  if (!five_disjoint(v)) throw PreconditionError("sigma^i(V), |i| <= 2, are not pairwise disjoint");
  return compose(make_f(v.shifted(-1)), make_f(v.shifted(1)));
}

inline TfgElement make_tau(const Subshift& ss, const CenteredWord& v) {
  auto cyl = ClopenSet::cylinder(ss, v);
  if (cyl.empty()) throw PreconditionError("'" + v.word + "' is not a cylinder of X");
  return make_tau(cyl);
}

struct CommutatorResult {
  TfgElement element;
  bool empty_intersection = false;
};

/// f_V f_U^{-1} f_V^{-1} f_U, checked against f_{sigma(U) cap sigma^{-1}(V)}.
inline CommutatorResult commutator_fW(const ClopenSet& u, const ClopenSet& v) {
  std::vector<ClopenSet> parts{u.shifted(-1), u, u.shifted(1).unite(v.shifted(-1)), v, v.shifted(1)};
  if (!pairwise_disjoint(parts))
    throw PreconditionError("commutator identity needs sigma^-1 U, U, sigma U cup sigma^-1 V, V, sigma V pairwise disjoint");
  auto fu = make_f(u), fv = make_f(v);
  auto c = compose(compose(fv, inverse(fu)), compose(inverse(fv), fu));
  auto w = u.shifted(1).intersect(v.shifted(-1));
  if (w.empty()) {
    if (!c.is_identity()) throw ConsistencyError("commutator of f_U, f_V is nontrivial although the overlap is empty");
    return {c, true};
  }
  if (c != make_f(w)) throw ConsistencyError("commutator of f_U, f_V differs from f_W");
  return {c, false};
}

inline CommutatorResult commutator_fW(const Subshift& ss, const CenteredWord& u, const CenteredWord& v) {
  return commutator_fW(ClopenSet::cylinder(ss, u), ClopenSet::cylinder(ss, v));
}

// ---------------------------------------------------------------------------

/// An ordered tuple of named generators.
class GeneratorSet {
public:
  /// One letter of S cup S^{-1} after deduplication.
  struct Letter {
    TfgElement element;
    int generator = 0;   // index into the ordered tuple
    bool inverse = false;
  };

  GeneratorSet() = default;
  explicit GeneratorSet(const Subshift& ss) : ss_(&ss) {}

  void add(std::string name, TfgElement g) {
    if (!ss_) ss_ = &g.subshift();
    if (&g.subshift() != ss_) throw PreconditionError("generator '" + name + "' lives on another subshift");
    names_.push_back(std::move(name));
    elements_.push_back(std::move(g));
    letters_.reset();
  }

  const Subshift& subshift() const {
    if (!ss_) throw PreconditionError("empty generator set has no subshift");
    return *ss_;
  }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  const std::vector<TfgElement>& elements() const noexcept { return elements_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const TfgElement& operator[](std::size_t i) const { return elements_.at(i); }

  /// True when the tuple is closed under inversion.
  bool symmetric() const {
    std::unordered_map<TfgElement, int, TfgHash> have;
    for (const auto& g : elements_) have.emplace(g, 0);
    for (const auto& g : elements_)
      if (!have.count(inverse(g))) return false;
    return true;
  }

  /// S cup S^{-1}, generators first, duplicates removed.
  const std::vector<Letter>& letters() const {
    if (letters_) return *letters_;
    std::vector<Letter> out;
    std::unordered_map<TfgElement, int, TfgHash> seen;
    for (std::size_t c = 0; c < elements_.size(); ++c)
      if (seen.emplace(elements_[c], 0).second) out.push_back({elements_[c], static_cast<int>(c), false});
    for (std::size_t c = 0; c < elements_.size(); ++c) {
      auto inv = inverse(elements_[c]);
      if (seen.emplace(inv, 0).second) out.push_back({std::move(inv), static_cast<int>(c), true});
    }
    letters_ = std::move(out);
    return *letters_;
  }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

private:
  const Subshift* ss_ = nullptr;
  std::vector<TfgElement> elements_;
  std::vector<std::string> names_;
  mutable std::optional<std::vector<Letter>> letters_;
};

/// B_S(n) by breadth-first search; element k was reached as letters()[letter[k]] o elements[parent[k]].
struct Ball {
  std::vector<TfgElement> elements;
  std::vector<int> length;
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> letter;
  std::unordered_map<TfgElement, std::int32_t, TfgHash> index;
  int radius = 0;
  bool truncated = false;

  std::size_t size() const noexcept { return elements.size(); }

  std::int32_t find(const TfgElement& g) const {
    auto it = index.find(g);
    return it == index.end() ? -1 : it->second;
  }
};

inline Ball word_length_ball(const GeneratorSet& s, int n, std::size_t budget) {
  if (n < 0) throw PreconditionError("ball radius must be nonnegative");
  Ball b;
  b.radius = n;
  const Subshift& ss = s.subshift();
  auto push = [&](TfgElement g, int len, std::int32_t parent, std::int32_t letter) {
    auto id = static_cast<std::int32_t>(b.elements.size());
    b.index.emplace(g, id);
    b.elements.push_back(std::move(g));
    b.length.push_back(len);
    b.parent.push_back(parent);
    b.letter.push_back(letter);
  };
  push(TfgElement::identity(ss), 0, -1, -1);
  const auto& letters = s.letters();
  std::size_t frontier_begin = 0;
  for (int len = 1; len <= n; ++len) {
    std::size_t frontier_end = b.elements.size();
    for (std::size_t k = frontier_begin; k < frontier_end; ++k) {
      for (std::size_t l = 0; l < letters.size(); ++l) {
        auto g = compose(letters[l].element, b.elements[k]);
        if (b.index.count(g)) continue;
        if (b.elements.size() >= budget) {
          b.truncated = true;
          return b;
        }
        push(std::move(g), len, static_cast<std::int32_t>(k), static_cast<std::int32_t>(l));
      }
    }
    frontier_begin = frontier_end;
  }
  return b;
}

}  // namespace lefg

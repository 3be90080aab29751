#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "growth_table.hpp"
#include "subshift.hpp"
#include "tfg.hpp"

namespace lefg {

using Perm = std::vector<std::int32_t>;

inline bool is_permutation(const Perm& p) {
  std::vector<std::uint8_t> hit(p.size(), 0);
  for (auto v : p) {
    if (v < 0 || static_cast<std::size_t>(v) >= p.size() || hit[static_cast<std::size_t>(v)]) return false;
    hit[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

inline Perm invert(const Perm& p) {
  Perm q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<std::size_t>(p[i])] = static_cast<std::int32_t>(i);
  return q;
}

/// (a o b)(i) = a(b(i)).
inline Perm compose_perm(const Perm& a, const Perm& b) {
  Perm c(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = a[static_cast<std::size_t>(b[i])];
  return c;
}

/// C_1 = max(1, lambda, canonical precision) over S and S^{-1}.
inline int compute_C1(const GeneratorSet& s) {
  int c = 1;
  for (const auto& l : s.letters()) c = std::max({c, l.element.lambda(), l.element.precision()});
  return c;
}

struct MSearch {
  std::int64_t M = 0;
  int C1 = 0;
  int r = 0;
  std::int64_t lower = 0;         // 10 C_1 r
  std::int64_t upper = 0;         // 2 R(10 C_1 r)
  std::int64_t first_covering = 0; // least M meeting the covering condition alone
};

/// Least M >= 10 C_1 r such that {sigma^i x : 1 <= i <= M} meets every C_1(r+1)-cylinder
/// and x_{-C..C} = x_{M-C..M+C} for C = C_1(2r+1).
inline MSearch find_M(const Subshift& ss, int C1, int r) {
  if (r < 1) throw PreconditionError("radius must be at least 1");
  if (C1 < 1) throw PreconditionError("C_1 must be positive");
  MSearch out;
  out.C1 = C1;
  out.r = r;
  out.lower = 10LL * C1 * r;
  out.upper = 2LL * static_cast<std::int64_t>(ss.recurrence(static_cast<std::size_t>(out.lower)));
  const std::int64_t k = static_cast<std::int64_t>(C1) * (r + 1);
  const auto target = static_cast<std::size_t>(ss.level(static_cast<int>(k)).size());
  const std::int64_t C = static_cast<std::int64_t>(C1) * (2 * r + 1);
  const std::int64_t pad = std::max(k, C);
  const std::int64_t base = -pad;  // x_base is w[0]
  Word w = ss.window(base, out.upper + pad);
  std::string_view sv(w);
  auto at = [&](std::int64_t i, std::int64_t len) { return sv.substr(static_cast<std::size_t>(i - base), static_cast<std::size_t>(len)); };

  std::unordered_set<std::string_view> seen;
  for (std::int64_t M = 1; M <= out.upper; ++M) {
    seen.insert(at(M - k, 2 * k + 1));
    if (seen.size() == target) {
      out.first_covering = M;
      break;
    }
  }
  if (out.first_covering == 0)
    throw ConsistencyError("no M <= " + std::to_string(out.upper) + " meets every " + std::to_string(k) + "-cylinder");
  auto centre = at(-C, 2 * C + 1);
  for (std::int64_t M = std::max(out.lower, out.first_covering); M <= out.upper; ++M) {
    if (at(M - C, 2 * C + 1) == centre) {
      out.M = M;
      return out;
    }
  }
  throw ConsistencyError("no admissible M in [" + std::to_string(std::max(out.lower, out.first_covering)) + ", " +
                         std::to_string(out.upper) + "]");
}

inline MSearch find_M(const Subshift& ss, const GeneratorSet& s, int r) { return find_M(ss, compute_C1(s), r); }

struct PermutationQuotient {
  std::int64_t M = 0;
  int r = 0;
  int C1 = 0;
  std::vector<Perm> perms;  // one per generator, in tuple order
  std::vector<std::string> names;
  std::string source_digest;
};

/// s_c-bar(n mod M) = phi(s_c)[n] mod M, n = 1..M.
inline PermutationQuotient build_quotient(const Subshift& ss, const GeneratorSet& s, int r) {
  if (s.empty()) throw PreconditionError("empty generator set");
  auto search = find_M(ss, s, r);
  PermutationQuotient q;
  q.M = search.M;
  q.r = r;
  q.C1 = search.C1;
  q.names = s.names();
  q.source_digest = ss.digest();
  for (std::size_t c = 0; c < s.size(); ++c) {
    auto phi = evaluate_range(s[c], 1, q.M);
    Perm p(static_cast<std::size_t>(q.M));
    for (std::int64_t n = 1; n <= q.M; ++n)
      p[static_cast<std::size_t>(n % q.M)] = static_cast<std::int32_t>(((phi[static_cast<std::size_t>(n - 1)] % q.M) + q.M) % q.M);
    if (!is_permutation(p)) throw ConsistencyError("reduction of generator '" + s.names()[c] + "' is not a bijection");
    q.perms.push_back(std::move(p));
  }
  return q;
}

/// First disagreement between q and the reduction of s modulo q.M, if any.
inline std::optional<std::string> quotient_mismatch(const GeneratorSet& s, const PermutationQuotient& q) {
  if (q.perms.size() != s.size()) return "generator count " + std::to_string(q.perms.size()) + " != " + std::to_string(s.size());
  if (q.M < 1) return std::string("M must be positive");
  for (std::size_t c = 0; c < s.size(); ++c) {
    const auto& p = q.perms[c];
    if (static_cast<std::int64_t>(p.size()) != q.M) return "permutation " + std::to_string(c) + " has the wrong length";
    auto phi = evaluate_range(s[c], 1, q.M);
    for (std::int64_t n = 1; n <= q.M; ++n) {
      auto want = static_cast<std::int32_t>(((phi[static_cast<std::size_t>(n - 1)] % q.M) + q.M) % q.M);
      if (p[static_cast<std::size_t>(n % q.M)] != want)
        return "generator '" + s.names()[c] + "' at point " + std::to_string(n % q.M) + ": stored " +
               std::to_string(p[static_cast<std::size_t>(n % q.M)]) + ", expected " + std::to_string(want);
    }
  }
  return std::nullopt;
}

/// Generator and inverse orbits on an integer interval, from single window passes.
class OrbitTable {
public:
  OrbitTable(const GeneratorSet& s, std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi) {
    for (std::size_t c = 0; c < s.size(); ++c) {
      fwd_.push_back(evaluate_range(s[c], lo, hi));
      bwd_.push_back(evaluate_range(inverse(s[c]), lo, hi));
    }
  }

  std::size_t colours() const noexcept { return fwd_.size(); }
  bool covers(std::int64_t v) const noexcept { return lo_ <= v && v <= hi_; }

  std::int64_t step(std::size_t c, bool inverse_dir, std::int64_t v) const {
    if (!covers(v)) throw PreconditionError("vertex " + std::to_string(v) + " outside the evaluated interval");
    return (inverse_dir ? bwd_ : fwd_)[c][static_cast<std::size_t>(v - lo_)];
  }

private:
  std::int64_t lo_, hi_;
  std::vector<std::vector<std::int64_t>> fwd_, bwd_;
};

struct SchreierBall {
  std::int64_t base = 0;
  int radius = 0;
  std::vector<std::int64_t> vertices;  // sorted
  std::vector<std::tuple<std::int64_t, std::int64_t, int>> edges;  // (v, s_c v, c), both ends in the ball
};

namespace detail {

template <class Step>
std::unordered_map<std::int64_t, int> bfs(std::int64_t base, int r, std::size_t colours, Step step) {
  std::unordered_map<std::int64_t, int> dist{{base, 0}};
  std::deque<std::int64_t> queue{base};
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    int d = dist[v];
    if (d == r) continue;
    for (std::size_t c = 0; c < colours; ++c)
      for (bool inv : {false, true}) {
        auto w = step(c, inv, v);
        if (dist.emplace(w, d + 1).second) queue.push_back(w);
      }
  }
  return dist;
}

}  // namespace detail

inline SchreierBall schreier_ball(const OrbitTable& orbits, std::int64_t n, int r) {
  SchreierBall b;
  b.base = n;
  b.radius = r;
  auto dist = detail::bfs(n, r, orbits.colours(), [&](std::size_t c, bool inv, std::int64_t v) { return orbits.step(c, inv, v); });
  for (auto& [v, d] : dist) b.vertices.push_back(v);
  std::sort(b.vertices.begin(), b.vertices.end());
  for (auto v : b.vertices)
    for (std::size_t c = 0; c < orbits.colours(); ++c) {
      if (r == 0) break;
      auto w = orbits.step(c, false, v);
      if (dist.count(w)) b.edges.emplace_back(v, w, static_cast<int>(c));
    }
  return b;
}

inline SchreierBall schreier_ball(const GeneratorSet& s, std::int64_t n, int r) {
  std::int64_t reach = static_cast<std::int64_t>(compute_C1(s)) * (r + 1);
  OrbitTable orbits(s, n - reach, n + reach);
  return schreier_ball(orbits, n, r);
}

struct ColourIsoReport {
  bool ok = true;
  std::size_t balls_checked = 0;
  std::optional<std::int64_t> witness;  // base vertex n of the first mismatch
  std::string reason;
};

/// Compares the radius-r ball of Schr(Gamma, Z, S) at each n = 1..M with the ball of
/// Z/MZ at n mod M, through reduction mod M.
inline ColourIsoReport local_colour_iso_check(const GeneratorSet& s, const PermutationQuotient& q, int r) {
  ColourIsoReport rep;
  if (q.perms.size() != s.size()) throw PreconditionError("quotient and generator set disagree on the colour count");
  const std::int64_t M = q.M;
  std::vector<Perm> inv;
  for (const auto& p : q.perms) inv.push_back(invert(p));
  std::int64_t reach = static_cast<std::int64_t>(q.C1) * (r + 1);
  OrbitTable orbits(s, 1 - reach, M + reach);
  auto mod = [M](std::int64_t v) { return ((v % M) + M) % M; };
  auto bar = [&](std::size_t c, bool i, std::int64_t v) -> std::int64_t {
    return (i ? inv[c] : q.perms[c])[static_cast<std::size_t>(v)];
  };
  for (std::int64_t n = 1; n <= M; ++n) {
    ++rep.balls_checked;
    auto step = [&](std::size_t c, bool i, std::int64_t v) { return orbits.step(c, i, v); };
    auto dg = detail::bfs(n, r, s.size(), step);
    auto dq = detail::bfs(mod(n), r, s.size(), bar);
    auto fail = [&](std::string why) {
      rep.ok = false;
      rep.witness = n;
      rep.reason = std::move(why);
    };
    if (dg.size() != dq.size()) {
      fail("ball sizes differ: " + std::to_string(dg.size()) + " vs " + std::to_string(dq.size()));
      return rep;
    }
    for (auto& [v, d] : dg) {
      auto it = dq.find(mod(v));
      if (it == dq.end() || it->second != d) {
        fail("vertex " + std::to_string(v) + " has no partner at the same distance");
        return rep;
      }
      for (std::size_t c = 0; c < s.size(); ++c)
        for (bool i : {false, true}) {
          auto w = orbits.step(c, i, v);
          bool in_g = dg.count(w) != 0;
          auto wb = bar(c, i, mod(v));
          bool in_q = dq.count(wb) != 0;
          if (in_g != in_q || (in_g && mod(w) != wb)) {
            fail("edge of colour " + std::to_string(c) + " at vertex " + std::to_string(v) + " is not preserved");
            return rep;
          }
        }
    }
  }
  return rep;
}

struct LocalEmbeddingCertificate {
  int ball_radius = 0;
  std::size_t ball_size = 0;
  std::size_t pairs_examined = 0;  // all (g, h) in the ball
  std::size_t pairs_checked = 0;   // those with gh in the ball
  std::size_t collisions = 0;
  bool injective = false;
  bool multiplicative = false;
  Ball ball;
  std::vector<std::int32_t> domain;  // points of Z/MZ moved by some generator
  std::vector<Perm> images;          // restricted to domain, one per ball element
};

/// Maps B_S(n) into Sym(M) through the quotient and verifies it is an injective partial homomorphism.
inline LocalEmbeddingCertificate certify_local_embedding(const GeneratorSet& s, const PermutationQuotient& q, int n,
                                                         std::size_t ball_budget) {
  if (n < 0) throw PreconditionError("ball radius must be nonnegative");
  if (n > (2 * q.r) / 3)
    throw PreconditionError("ball radius " + std::to_string(n) + " exceeds floor(2r/3) for r = " + std::to_string(q.r));
  if (q.perms.size() != s.size()) throw PreconditionError("quotient and generator set disagree on the generator count");
  for (std::size_t c = 0; c < q.perms.size(); ++c)
    if (static_cast<std::int64_t>(q.perms[c].size()) != q.M || !is_permutation(q.perms[c]))
      throw CertificateFailure("quotient permutation '" + q.names.at(c) + "' is not a permutation of Z/" + std::to_string(q.M));

  LocalEmbeddingCertificate cert;
  cert.ball_radius = n;
  cert.ball = word_length_ball(s, n, ball_budget);
  if (cert.ball.truncated)
    throw BudgetError("ball of radius " + std::to_string(n) + " exceeds the budget of " + std::to_string(ball_budget));
  cert.ball_size = cert.ball.size();

  const auto& letters = s.letters();
  std::vector<Perm> letter_full;
  for (const auto& l : letters) {
    const auto& p = q.perms[static_cast<std::size_t>(l.generator)];
    letter_full.push_back(l.inverse ? invert(p) : p);
  }
  std::vector<std::int32_t> slot(static_cast<std::size_t>(q.M), -1);
  for (const auto& p : letter_full)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != static_cast<std::int32_t>(i) && slot[i] < 0) slot[i] = 0;
  for (std::size_t i = 0; i < slot.size(); ++i)
    if (slot[i] == 0) {
      slot[i] = static_cast<std::int32_t>(cert.domain.size());
      cert.domain.push_back(static_cast<std::int32_t>(i));
    }
  const std::size_t D = cert.domain.size();
  std::vector<Perm> letter_perm;
  for (const auto& p : letter_full) {
    Perm r(D);
    for (std::size_t k = 0; k < D; ++k) r[k] = slot[static_cast<std::size_t>(p[static_cast<std::size_t>(cert.domain[k])])];
    letter_perm.push_back(std::move(r));
  }

  auto& imgs = cert.images;
  imgs.resize(cert.ball.size());
  Perm id(D);
  for (std::size_t k = 0; k < D; ++k) id[k] = static_cast<std::int32_t>(k);
  imgs[0] = id;
  for (std::size_t e = 1; e < cert.ball.size(); ++e)
    imgs[e] = compose_perm(letter_perm[static_cast<std::size_t>(cert.ball.letter[e])],
                           imgs[static_cast<std::size_t>(cert.ball.parent[e])]);

  const auto& el = cert.ball.elements;
  Perm scratch(D);
  for (std::size_t i = 0; i < el.size(); ++i) {
    const auto& pi = imgs[i];
    for (std::size_t j = 0; j < el.size(); ++j) {
      ++cert.pairs_examined;
      auto gh = compose(el[i], el[j]);
      auto k = cert.ball.find(gh);
      if (k < 0) continue;
      ++cert.pairs_checked;
      const auto& pj = imgs[j];
      const auto& pk = imgs[static_cast<std::size_t>(k)];
      for (std::size_t t = 0; t < D; ++t)
        if (pi[static_cast<std::size_t>(pj[t])] != pk[t])
          throw CertificateFailure("image of a product differs from the product of images (ball elements " +
                                   std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  cert.multiplicative = true;

  struct PermHash {
    std::size_t operator()(const Perm* p) const noexcept {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (auto v : *p) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 0x100000001b3ULL;
      }
      return static_cast<std::size_t>(h);
    }
  };
  struct PermEq {
    bool operator()(const Perm* a, const Perm* b) const noexcept { return *a == *b; }
  };
  std::unordered_set<const Perm*, PermHash, PermEq> distinct;
  for (const auto& p : imgs)
    if (!distinct.insert(&p).second) ++cert.collisions;
  cert.injective = cert.collisions == 0;
  if (!cert.injective)
    throw CertificateFailure(std::to_string(cert.collisions) + " ball elements share an image permutation");
  return cert;
}

/// log(M!).
inline double log_factorial(std::int64_t M) { return std::lgamma(static_cast<double>(M) + 1.0); }

struct UpperGrowth {
  GrowthTable degree{Meaning::quotient_degree};
  GrowthTable log_order{Meaning::quotient_log_order};
  std::vector<std::int64_t> radii;  // the r that produced each row
};

/// Rows (floor(2r/3), M) and (floor(2r/3), log M!). For radii sharing a row the smallest r wins.
inline UpperGrowth growth_upper_datapoints(const Subshift& ss, const GeneratorSet& s, std::vector<int> r_list) {
  if (r_list.empty()) throw PreconditionError("empty radius list");
  std::sort(r_list.begin(), r_list.end());
  r_list.erase(std::unique(r_list.begin(), r_list.end()), r_list.end());
  UpperGrowth out;
  const std::int64_t C1 = compute_C1(s);
  std::int64_t last_n = -1;
  for (int r : r_list) {
    std::int64_t n = (2 * r) / 3;
    if (n == last_n) continue;
    last_n = n;
    std::int64_t M;
    bool exact = true;
    try {
      M = build_quotient(ss, s, r).M;
    } catch (const BudgetError&) {
      // fall back to the guaranteed degree; still an upper bound, but not a built quotient
      M = 2 * static_cast<std::int64_t>(ss.recurrence(static_cast<std::size_t>(10 * C1 * r)));
      exact = false;
    }
    out.degree.add(n, static_cast<double>(M), exact);
    out.log_order.add(n, log_factorial(M), exact);
    out.radii.push_back(r);
  }
  return out;
}

}  // namespace lefg

#pragma once

// Brute-force references used by the tests. Nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Fibonacci word x_0 x_1 ... as a mechanical (Sturmian) word of slope 2 - phi.
inline std::string fibonacci_prefix(std::size_t len) {
  const long double alpha = 2.0L - (1.0L + std::sqrt(5.0L)) / 2.0L;
  std::string s(len, 'a');
  for (std::size_t n = 0; n < len; ++n) {
    auto d = std::floor((n + 2) * alpha) - std::floor((n + 1) * alpha);
    s[n] = d == 0 ? 'a' : 'b';
  }
  return s;
}

// Same word by literal string rewriting of a -> ab, b -> a.
inline std::string fibonacci_by_rewriting(std::size_t len) {
  std::string w = "a";
  while (w.size() < len) {
    std::string next;
    for (char c : w) next += c == 'a' ? "ab" : "a";
    w = next;
  }
  return w.substr(0, len);
}

inline std::set<std::string> factor_set(const std::string& s, std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) out.insert(s.substr(i, n));
  return out;
}

// Least M such that every length-M window of s contains every factor in fs (0 if none fits).
inline std::size_t recurrence(const std::string& s, const std::set<std::string>& fs, std::size_t n) {
  for (std::size_t M = n; M <= s.size(); ++M) {
    bool all = true;
    for (std::size_t i = 0; i + M <= s.size() && all; ++i) {
      auto win = s.substr(i, M);
      for (const auto& f : fs)
        if (win.find(f) == std::string::npos) {
          all = false;
          break;
        }
    }
    if (all) return M;
  }
  return 0;
}

// Same quantity from occurrence gaps; linear enough for texts of a few 10^4 letters.
inline std::size_t recurrence_by_gaps(const std::string& s, std::size_t n) {
  std::size_t R = 0;
  for (const auto& f : factor_set(s, n)) {
    std::size_t prev = 0, need = 0;
    bool first = true;
    for (auto p = s.find(f); p != std::string::npos; p = s.find(f, p + 1)) {
      need = std::max(need, first ? p + n : p - prev - 1 + n);
      prev = p;
      first = false;
    }
    need = std::max(need, s.size() - prev);
    R = std::max(R, need);
  }
  return R;
}

// Point-level elements. text holds x[base .. base + size - 1]; a cylinder u of radius m
// contains sigma^k x iff x[k - m .. k + m] = u.
struct Text {
  std::string s;
  std::int64_t base = 0;

  bool matches(std::int64_t centre, const std::string& u) const {
    std::int64_t m = static_cast<std::int64_t>(u.size() / 2);
    std::int64_t lo = centre - m - base;
    if (lo < 0 || lo + static_cast<std::int64_t>(u.size()) > static_cast<std::int64_t>(s.size())) return false;
    return s.compare(static_cast<std::size_t>(lo), u.size(), u) == 0;
  }
};

using Pred = std::function<bool(std::int64_t)>;  // does sigma^k x lie in Z
using Map = std::function<std::int64_t(std::int64_t)>;

// f_Z moves sigma^{-1}Z -> Z -> sigma Z -> sigma^{-1}Z.
inline Map f_of(Pred z) {
  return [z](std::int64_t k) -> std::int64_t {
    if (z(k + 1) || z(k)) return k + 1;
    if (z(k - 1)) return k - 2;
    return k;
  };
}

// h_Z swaps sigma^{-1}Z and Z.
inline Map h_of(Pred z) {
  return [z](std::int64_t k) -> std::int64_t {
    if (z(k + 1)) return k + 1;
    if (z(k)) return k - 1;
    return k;
  };
}

inline Map inverse_f(Pred z) {
  return [z](std::int64_t k) -> std::int64_t {
    if (z(k)) return k - 1;
    if (z(k + 1)) return k + 2;
    if (z(k - 1)) return k - 1;
    return k;
  };
}

inline Map then(Map first, Map second) {
  return [first, second](std::int64_t k) { return second(first(k)); };
}

inline Pred shifted(Pred z, int i) {
  return [z, i](std::int64_t k) { return z(k - i); };
}

inline std::vector<std::int64_t> cycle_type(const std::vector<std::int32_t>& p) {
  std::vector<std::int64_t> lens;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::int64_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
      seen[j] = 1;
      ++len;
    }
    lens.push_back(len);
  }
  std::sort(lens.begin(), lens.end());
  return lens;
}

}  // namespace oracle

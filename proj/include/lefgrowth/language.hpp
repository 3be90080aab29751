#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "scan.hpp"
#include "word.hpp"
#include "word_source.hpp"

namespace lefg {

/// A value plus whether it is certified. Uncertified values are lower bounds.
template <class T>
struct Measured {
  T value{};
  bool exact = false;

  const T& require_exact(const std::string& what) const {
    if (!exact) throw InexactResult(what + " is not certified", static_cast<double>(value));
    return value;
  }
};

namespace detail {

/// The finite stretch of x used for uncertified scans.
inline Word scan_window(const WordSource& src, std::size_t min_len, const Budget& budget) {
  if (auto sp = src.span()) {
    std::int64_t lo = sp->lo, hi = sp->hi;
    auto len = static_cast<std::size_t>(hi - lo + 1);
    if (len > budget.window) hi = lo + static_cast<std::int64_t>(budget.window) - 1;
    return src.window(lo, hi);
  }
  std::size_t len = std::max<std::size_t>(min_len, 4096);
  len = std::min(len, budget.window);
  auto half = static_cast<std::int64_t>(len / 2);
  return src.window(-half, half);
}

}  // namespace detail

/// F_n(x): exact when the source certifies it, otherwise the factors of a scan window.
inline Measured<FactorSet> factor_set(const WordSource& src, std::size_t n, const Budget& budget = {}) {
  if (n < 1) throw PreconditionError("factor length must be positive");
  if (auto fs = src.exact_factors(n)) return {std::move(*fs), true};
  Word s = detail::scan_window(src, 64 * n, budget);
  if (s.size() < n) throw BudgetError("scan window shorter than factor length");
  return {factors(src.alphabet(), s, n), false};
}

/// p_x(n).
inline Measured<std::size_t> complexity(const WordSource& src, std::size_t n, const Budget& budget = {}) {
  auto fs = factor_set(src, n, budget);
  return {fs.value.size(), fs.exact};
}

/// R_x(n).
inline Measured<std::size_t> recurrence(const WordSource& src, std::size_t n, const Budget& budget = {}) {
  if (n < 1) throw PreconditionError("factor length must be positive");
  if (auto r = src.exact_recurrence(n)) return {*r, true};
  auto fs = factor_set(src, n, budget);
  Word s = detail::scan_window(src, 64 * n, budget);
  FactorIndex index(fs.value);
  auto r = window_recurrence(s, index);
  // a factor that never shows up in the window: the whole window misses it
  return {r ? *r : s.size() + 1, false};
}

struct EntropyEstimate {
  double value = 0;             // log p(n_max) / n_max
  std::vector<double> sequence; // log p(n) / n for n = 1..n_max
  bool exact = false;
};

inline EntropyEstimate entropy_estimate(const WordSource& src, std::size_t n_max, const Budget& budget = {}) {
  if (n_max < 2) throw PreconditionError("entropy estimate needs n_max >= 2");
  EntropyEstimate out;
  out.exact = true;
  for (std::size_t n = 1; n <= n_max; ++n) {
    auto p = complexity(src, n, budget);
    out.exact = out.exact && p.exact;
    out.sequence.push_back(std::log(static_cast<double>(p.value)) / static_cast<double>(n));
  }
  out.value = out.sequence.back();
  return out;
}

/// Cyl_X(m) as centred words of length 2m+1, in alphabet order.
inline Measured<std::vector<CenteredWord>> cylinders(const WordSource& src, int m, const Budget& budget = {}) {
  if (m < 0) throw PreconditionError("cylinder radius must be nonnegative");
  auto fs = factor_set(src, static_cast<std::size_t>(2 * m + 1), budget);
  std::vector<CenteredWord> out;
  out.reserve(fs.value.size());
  for (auto& w : fs.value.words) out.emplace_back(w);
  return {std::move(out), fs.exact};
}

}  // namespace lefg

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "language.hpp"
#include "word.hpp"
#include "word_source.hpp"

namespace lefg {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// The m-cylinders of X at one precision, with dense ids in alphabet order.
struct CylinderLevel {
  int m = 0;
  std::vector<Word> words;
  std::unordered_map<std::string, std::int32_t> index;

  std::int32_t size() const noexcept { return static_cast<std::int32_t>(words.size()); }

  std::int32_t id(std::string_view w) const {
    auto it = index.find(std::string(w));
    return it == index.end() ? -1 : it->second;
  }
};

/// X = closure of the orbit of a source's point, seen through its exact factor language.
/// Every cylinder computation goes through here, so all caches live here too.
class Subshift {
public:
  explicit Subshift(std::shared_ptr<const WordSource> src, Budget budget = {})
      : src_(std::move(src)), budget_(budget) {
    if (!src_) throw PreconditionError("null word source");
  }

  const WordSource& source() const noexcept { return *src_; }
  std::shared_ptr<const WordSource> source_ptr() const noexcept { return src_; }
  const Alphabet& alphabet() const noexcept { return src_->alphabet(); }
  const Budget& budget() const noexcept { return budget_; }

  std::string digest() const { return hex64(fnv1a64(src_->describe())); }

  /// Cyl_X(m); requires the source to certify F_{2m+1}.
  const CylinderLevel& level(int m) const {
    if (m < 0) throw PreconditionError("negative cylinder precision");
    std::lock_guard lock(mu_);
    auto it = levels_.find(m);
    if (it != levels_.end()) return *it->second;
    auto fs = src_->exact_factors(static_cast<std::size_t>(2 * m + 1));
    if (!fs) throw InexactResult("cylinders at precision " + std::to_string(m) + " are not certified", 0);
    auto lv = std::make_unique<CylinderLevel>();
    lv->m = m;
    lv->words = std::move(fs->words);
    lv->index.reserve(lv->words.size() * 2);
    for (std::size_t i = 0; i < lv->words.size(); ++i) lv->index.emplace(lv->words[i], static_cast<std::int32_t>(i));
    return *levels_.emplace(m, std::move(lv)).first->second;
  }

  /// For each from-cylinder of y: the id of the to-cylinder containing sigma^offset(y).
  const std::vector<std::int32_t>& projection(int from, int to, int offset) const {
    if (to < 0 || to + std::abs(offset) > from)
      throw PreconditionError("projection needs to + |offset| <= from");
    std::uint64_t key = (static_cast<std::uint64_t>(from) << 40) | (static_cast<std::uint64_t>(to) << 20) |
                        static_cast<std::uint64_t>(offset + (1 << 19));
    {
      std::lock_guard lock(mu_);
      auto it = proj_.find(key);
      if (it != proj_.end()) return *it->second;
    }
    const auto& hi = level(from);
    const auto& lo = level(to);
    auto out = std::make_unique<std::vector<std::int32_t>>(hi.words.size());
    for (std::size_t i = 0; i < hi.words.size(); ++i) {
      std::string_view w(hi.words[i]);
      auto id = lo.id(w.substr(static_cast<std::size_t>(from + offset - to), static_cast<std::size_t>(2 * to + 1)));
      if (id < 0) throw ConsistencyError("factor language is not factorial at precision " + std::to_string(to));
      (*out)[i] = id;
    }
    std::lock_guard lock(mu_);
    return *proj_.emplace(key, std::move(out)).first->second;
  }

  std::size_t complexity(std::size_t n) const {
    return static_cast<std::size_t>(level_for_length(n));
  }

  /// Certified R_x(n).
  std::size_t recurrence(std::size_t n) const {
    {
      std::lock_guard lock(mu_);
      auto it = rec_.find(n);
      if (it != rec_.end()) return it->second;
    }
    auto r = lefg::recurrence(*src_, n, budget_).require_exact("R(" + std::to_string(n) + ")");
    std::lock_guard lock(mu_);
    rec_[n] = r;
    return r;
  }

  /// x_i..x_j.
  Word window(std::int64_t i, std::int64_t j) const { return src_->window(i, j); }

private:
  std::size_t level_for_length(std::size_t n) const {
    if (n % 2 == 1) return static_cast<std::size_t>(level(static_cast<int>(n / 2)).size());
    return lefg::complexity(*src_, n, budget_).require_exact("p(" + std::to_string(n) + ")");
  }

  std::shared_ptr<const WordSource> src_;
  Budget budget_;
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<CylinderLevel>> levels_;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<std::vector<std::int32_t>>> proj_;
  mutable std::map<std::size_t, std::size_t> rec_;
};

inline std::shared_ptr<Subshift> make_subshift(std::shared_ptr<const WordSource> src, Budget budget = {}) {
  return std::make_shared<Subshift>(std::move(src), budget);
}

}  // namespace lefg

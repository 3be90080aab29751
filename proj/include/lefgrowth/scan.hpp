#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "word.hpp"

namespace lefg {

/// Dense ids for the members of a FactorSet. Borrows the set's storage.
class FactorIndex {
public:
  explicit FactorIndex(const FactorSet& fs) : n_(fs.n) {
    ids_.reserve(fs.words.size() * 2);
    for (std::size_t i = 0; i < fs.words.size(); ++i) ids_.emplace(fs.words[i], static_cast<int>(i));
  }

  std::size_t length() const noexcept { return n_; }
  std::size_t size() const noexcept { return ids_.size(); }

  int find(std::string_view w) const {
    auto it = ids_.find(w);
    return it == ids_.end() ? -1 : it->second;
  }

private:
  std::size_t n_;
  std::unordered_map<std::string_view, int> ids_;
};

/// Least M such that every length-M window of s contains every member of the index.
/// Boundary windows count, so the result is a lower bound for R(n) whenever s is a factor.
/// Empty when some member never occurs in s.
inline std::optional<std::size_t> window_recurrence(std::string_view s, const FactorIndex& index) {
  const std::size_t n = index.length();
  if (s.size() < n) return std::nullopt;
  std::vector<std::int64_t> last(index.size(), -1);
  std::int64_t longest_miss = 0;
  for (std::size_t p = 0; p + n <= s.size(); ++p) {
    int id = index.find(s.substr(p, n));
    if (id < 0) continue;
    auto pos = static_cast<std::int64_t>(p);
    longest_miss = std::max(longest_miss, pos - last[id] + static_cast<std::int64_t>(n) - 2);
    last[id] = pos;
  }
  for (auto l : last) {
    if (l < 0) return std::nullopt;
    longest_miss = std::max(longest_miss, static_cast<std::int64_t>(s.size()) - l - 1);
  }
  return static_cast<std::size_t>(longest_miss + 1);
}

/// Largest gap between successive starts of any member, plus n-1. Ignores the ends of s.
inline std::size_t interior_recurrence(std::string_view s, const FactorIndex& index) {
  const std::size_t n = index.length();
  std::vector<std::int64_t> last(index.size(), -1);
  std::int64_t gap = 0;
  for (std::size_t p = 0; p + n <= s.size(); ++p) {
    int id = index.find(s.substr(p, n));
    if (id < 0) continue;
    auto pos = static_cast<std::int64_t>(p);
    if (last[id] >= 0) gap = std::max(gap, pos - last[id]);
    last[id] = pos;
  }
  return gap == 0 ? 0 : static_cast<std::size_t>(gap) + n - 1;
}

}  // namespace lefg

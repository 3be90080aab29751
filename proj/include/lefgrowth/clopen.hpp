#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "error.hpp"
#include "subshift.hpp"
#include "word.hpp"

namespace lefg {

/// A clopen subset of X: a union of m-cylinders at one precision.
class ClopenSet {
public:
  ClopenSet() = default;
  ClopenSet(const Subshift& ss, int precision, std::vector<std::uint8_t> member)
      : ss_(&ss), precision_(precision), member_(std::move(member)) {
    if (static_cast<std::int32_t>(member_.size()) != ss.level(precision).size())
      throw PreconditionError("membership vector does not match the cylinder count");
  }

  static ClopenSet empty_set(const Subshift& ss, int precision) {
    return {ss, precision, std::vector<std::uint8_t>(static_cast<std::size_t>(ss.level(precision).size()), 0)};
  }

  /// The cylinder <<u>> (empty if u is not a factor).
  static ClopenSet cylinder(const Subshift& ss, const CenteredWord& u) {
    auto out = empty_set(ss, u.radius());
    auto id = ss.level(u.radius()).id(u.word);
    if (id >= 0) out.member_[static_cast<std::size_t>(id)] = 1;
    return out;
  }

  /// { z : z_offset .. z_{offset+|w|-1} = w }.
  static ClopenSet pattern(const Subshift& ss, std::int64_t offset, const Word& w) {
    if (w.empty()) throw PreconditionError("empty pattern");
    std::int64_t hi = offset + static_cast<std::int64_t>(w.size()) - 1;
    int p = static_cast<int>(std::max<std::int64_t>(-offset, hi));
    p = std::max(p, 0);
    const auto& lv = ss.level(p);
    auto out = empty_set(ss, p);
    for (std::int32_t i = 0; i < lv.size(); ++i)
      if (lv.words[static_cast<std::size_t>(i)].compare(static_cast<std::size_t>(p + offset), w.size(), w) == 0)
        out.member_[static_cast<std::size_t>(i)] = 1;
    return out;
  }

  const Subshift& subshift() const { return *ss_; }
  int precision() const noexcept { return precision_; }
  const std::vector<std::uint8_t>& members() const noexcept { return member_; }
  bool contains_id(std::int32_t id) const { return member_[static_cast<std::size_t>(id)] != 0; }

  bool empty() const {
    return std::none_of(member_.begin(), member_.end(), [](std::uint8_t b) { return b != 0; });
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(member_.begin(), member_.end(), [](std::uint8_t b) { return b != 0; }));
  }

  std::vector<CenteredWord> cylinders() const {
    std::vector<CenteredWord> out;
    const auto& lv = ss_->level(precision_);
    for (std::size_t i = 0; i < member_.size(); ++i)
      if (member_[i]) out.emplace_back(lv.words[i]);
    return out;
  }

  /// Same set at a finer precision.
  ClopenSet refined(int q) const {
    if (q < precision_) throw PreconditionError("refinement must not lower the precision");
    if (q == precision_) return *this;
    const auto& proj = ss_->projection(q, precision_, 0);
    std::vector<std::uint8_t> m(proj.size());
    for (std::size_t i = 0; i < proj.size(); ++i) m[i] = member_[static_cast<std::size_t>(proj[i])];
    return {*ss_, q, std::move(m)};
  }

  /// sigma^i of this set: z belongs iff sigma^{-i} z does.
  ClopenSet shifted(int i) const {
    if (i == 0) return *this;
    int q = precision_ + std::abs(i);
    const auto& proj = ss_->projection(q, precision_, -i);
    std::vector<std::uint8_t> m(proj.size());
    for (std::size_t k = 0; k < proj.size(); ++k) m[k] = member_[static_cast<std::size_t>(proj[k])];
    return {*ss_, q, std::move(m)};
  }

  ClopenSet intersect(const ClopenSet& o) const { return combine(o, [](bool a, bool b) { return a && b; }); }
  ClopenSet unite(const ClopenSet& o) const { return combine(o, [](bool a, bool b) { return a || b; }); }
  ClopenSet minus(const ClopenSet& o) const { return combine(o, [](bool a, bool b) { return a && !b; }); }

  bool disjoint(const ClopenSet& o) const { return intersect(o).empty(); }
  bool subset_of(const ClopenSet& o) const { return minus(o).empty(); }

  bool same_set(const ClopenSet& o) const {
    int q = std::max(precision_, o.precision_);
    return refined(q).member_ == o.refined(q).member_;
  }

private:
  template <class Op>
  ClopenSet combine(const ClopenSet& o, Op op) const {
    if (ss_ != o.ss_) throw PreconditionError("clopen sets live in different subshifts");
    int q = std::max(precision_, o.precision_);
    auto a = refined(q), b = o.refined(q);
    for (std::size_t i = 0; i < a.member_.size(); ++i) a.member_[i] = op(a.member_[i] != 0, b.member_[i] != 0) ? 1 : 0;
    return a;
  }

  const Subshift* ss_ = nullptr;
  int precision_ = 0;
  std::vector<std::uint8_t> member_;
};

/// Pairwise disjointness of a family of clopen sets.
inline bool pairwise_disjoint(const std::vector<ClopenSet>& sets) {
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (!sets[i].disjoint(sets[j])) return false;
  return true;
}

}  // namespace lefg

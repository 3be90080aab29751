#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <lefgrowth/jlp.hpp>

#include "oracles.hpp"

using namespace lefg;

namespace {

JlpParams toy_params(std::uint64_t seed = 1) {
  JlpParams p;
  p.x = 30;
  p.toy_cap = 12;
  p.levels = 2;
  p.seed = seed;
  return p;
}

JlpParams exact_params() {
  JlpParams p;
  p.r = 2.0;
  p.x = 30;
  p.levels = 1;
  return p;
}

// member i of C_j by literal concatenation from the stored permutations
std::string expand_ref(const JlpFamily& fam, int j, std::int64_t i) {
  if (j == 0) return fam.level(0).words[static_cast<std::size_t>(i)];
  const auto& prev = fam.level(static_cast<std::size_t>(j - 1));
  const auto& pi = fam.level(static_cast<std::size_t>(j)).perms[static_cast<std::size_t>(i)];
  const std::int64_t third = prev.N / 3;
  std::string out;
  for (std::int64_t t = 0; t < third; ++t) out += expand_ref(fam, j - 1, t);
  for (std::int64_t t = 0; t < third; ++t) out += expand_ref(fam, j - 1, third + pi[static_cast<std::size_t>(t)]);
  for (std::int64_t t = 2 * third; t < prev.N; ++t) out += expand_ref(fam, j - 1, t);
  return out;
}

}  // namespace

TEST(JlpParamsTest, Validation) {
  auto p = exact_params();
  EXPECT_NO_THROW(p.validate());
  p.x = 31;
  EXPECT_THROW(p.validate(), PreconditionError);
  p.x = 12;  // 2^(4-2) = 4 < 12
  EXPECT_THROW(p.validate(), PreconditionError);
  p = exact_params();
  p.r = 1.5;
  EXPECT_THROW(p.validate(), PreconditionError);
  p = toy_params();
  p.toy_cap = 10;
  EXPECT_THROW(p.validate(), PreconditionError);
  p = toy_params();
  p.levels = 0;
  EXPECT_THROW(p.validate(), PreconditionError);
}

TEST(JlpLevel0, WordsHaveTheRightShape) {
  auto lv = build_level0(exact_params());
  ASSERT_EQ(lv.words.size(), 30u);
  EXPECT_EQ(lv.N, 30);
  EXPECT_EQ(lv.l, 30);
  std::set<std::string> distinct(lv.words.begin(), lv.words.end());
  EXPECT_EQ(distinct.size(), 30u);
  const std::string a10(10, 'a'), b10(10, 'b');
  for (const auto& w : lv.words) {
    ASSERT_EQ(w.size(), 30u);
    EXPECT_EQ(w.substr(0, 10), a10);
    EXPECT_EQ(w.substr(20), b10);
    EXPECT_EQ(w[10], 'b');
    EXPECT_EQ(w[19], 'a');
    EXPECT_EQ(w.find(a10, 1), std::string::npos) << w;
    EXPECT_EQ(w.find(b10), 20u) << w;
  }
  EXPECT_TRUE(std::is_sorted(lv.words.begin(), lv.words.end()));
}

TEST(JlpBuild, ToyShapes) {
  auto fam = build_family(toy_params());
  ASSERT_EQ(fam.size(), 3u);
  EXPECT_EQ(fam.level(0).N, 30);
  EXPECT_EQ(fam.level(1).N, 12);
  EXPECT_EQ(fam.level(2).N, 12);
  EXPECT_EQ(fam.level(1).l, 900);
  EXPECT_EQ(fam.level(2).l, 10800);
  EXPECT_TRUE(fam.level(1).capped);
  EXPECT_TRUE(fam.level(2).capped);
  for (std::size_t j = 1; j < 3; ++j) {
    const auto& lv = fam.level(j);
    for (const auto& pi : lv.perms) {
      auto sorted = pi;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t k = 0; k < sorted.size(); ++k) ASSERT_EQ(sorted[k], static_cast<std::int32_t>(k));
      EXPECT_EQ(pi.size(), static_cast<std::size_t>(fam.level(j - 1).N / 3));
    }
  }
}

TEST(JlpBuild, ExtractionMatchesLiteralConcatenation) {
  auto fam = build_family(toy_params());
  std::mt19937_64 rng(7);
  for (int j = 0; j <= 2; ++j)
    for (std::int64_t i = 0; i < fam.level(static_cast<std::size_t>(j)).N; i += 5) {
      auto ref = expand_ref(fam, j, i);
      ASSERT_EQ(fam.expand(j, i), ref);
      for (int trial = 0; trial < 20; ++trial) {
        std::int64_t pos = static_cast<std::int64_t>(rng() % ref.size());
        std::int64_t len = static_cast<std::int64_t>(rng() % (ref.size() - static_cast<std::size_t>(pos) + 1));
        EXPECT_EQ(fam.extract(j, i, pos, len), ref.substr(static_cast<std::size_t>(pos), static_cast<std::size_t>(len)));
      }
    }
  EXPECT_THROW(fam.extract(1, 0, 890, 20), PreconditionError);
}

TEST(JlpBuild, ExactCollectionSize) {
  auto fam = build_family(exact_params());
  ASSERT_EQ(fam.size(), 2u);
  const double e = std::exp(std::pow(std::log(30.0), 2.0));
  EXPECT_EQ(fam.level(1).N, 3 * static_cast<std::int64_t>(std::floor(e / 3.0)));
  EXPECT_EQ(fam.level(1).N, 105675);
  EXPECT_EQ(fam.level(1).l, 900);
  EXPECT_FALSE(fam.level(1).capped);
  EXPECT_LE(fam.level(1).N, 3628800);  // 10!
}

TEST(JlpBuild, SeedDeterminesTheFamily) {
  auto a = build_family(toy_params(5)), b = build_family(toy_params(5)), c = build_family(toy_params(6));
  EXPECT_EQ(a.level(0).words, b.level(0).words);
  EXPECT_EQ(a.level(2).perms, b.level(2).perms);
  EXPECT_EQ(a.expand(2, 3), b.expand(2, 3));
  EXPECT_NE(a.level(0).words, c.level(0).words);
}

TEST(JlpBuild, OversizedCollectionsAreRefused) {
  auto p = exact_params();
  p.levels = 2;  // |P_1| = N_1^2 > 10^10
  EXPECT_THROW(build_family(p), BudgetError);
}

TEST(JlpInvariants, ToyClausesPass) {
  auto fam = build_family(toy_params());
  auto rep = verify_level_invariants(fam);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.count(ClauseStatus::fail), 0u);
  EXPECT_EQ(rep.count(ClauseStatus::skipped), 2u);
  EXPECT_GE(rep.count(ClauseStatus::pass), 10u);
}

TEST(JlpInvariants, ExactClausesPass) {
  auto fam = build_family(exact_params());
  auto rep = verify_level_invariants(fam);
  for (const auto& c : rep.clauses) EXPECT_NE(c.status, ClauseStatus::fail) << c.name;
  EXPECT_EQ(rep.count(ClauseStatus::skipped), 0u);
  // the same inequalities from first principles: N_1 >= N_0^2 and N_0 < l_1 <= N_0^2
  const auto N0 = fam.level(0).N, N1 = fam.level(1).N, l1 = fam.level(1).l;
  EXPECT_GE(N1, N0 * N0);
  EXPECT_TRUE(N0 < l1 && l1 <= N0 * N0);
}

TEST(JlpInvariants, BrokenStructureIsDetected) {
  auto fam = build_family(toy_params());
  JlpFamily bad(fam.params());
  bad.push(fam.level(0));
  auto l1 = fam.level(1);
  l1.perms[1] = l1.perms[0];
  bad.push(l1);
  bad.push(fam.level(2));
  EXPECT_FALSE(verify_level_invariants(bad).ok());
}

TEST(JlpSource, AnchorsNestTheLevels) {
  auto fam = std::make_shared<const JlpFamily>(build_family(toy_params()));
  auto src = jlp_word_source(fam);
  const auto& L = fam->levels();
  // x^(j) sits at K_j inside x^(j+1), K_j = l_j (N_j/3 - 1) + 1
  for (std::size_t j = 0; j + 1 < L.size(); ++j) {
    const auto lo = fam->expand(static_cast<int>(j), L[j].N / 3 - 1);
    const auto hi = fam->expand(static_cast<int>(j + 1), L[j + 1].N / 3 - 1);
    const auto K = L[j].l * (L[j].N / 3 - 1) + 1;
    EXPECT_EQ(src->anchors_k()[j], K);
    EXPECT_EQ(hi.substr(static_cast<std::size_t>(K - 1), lo.size()), lo);
  }
  // with M_0 = 1, x[0 .. l_0 - 1] is x^(0)
  EXPECT_EQ(src->window(0, 29), fam->expand(0, 9));
  auto sp = *src->span();
  EXPECT_EQ(sp.hi - sp.lo + 1, 10800);
  EXPECT_EQ(src->window(sp.lo, sp.hi), fam->expand(2, 3));
}

TEST(JlpSource, ComplexityClausesPass) {
  auto fam = build_family(toy_params());
  auto rep = check_complexity_lb(fam);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.count(ClauseStatus::pass), 2u);
  auto ex = build_family(exact_params());
  auto rex = check_complexity_lb(ex);
  EXPECT_TRUE(rex.ok());
  EXPECT_EQ(rex.count(ClauseStatus::skipped), 0u);
}

TEST(JlpSource, RecurrenceScanMatchesGapOracle) {
  auto fam = std::make_shared<const JlpFamily>(build_family(toy_params()));
  auto src = jlp_word_source(fam);
  auto sp = *src->span();
  const auto text = src->window(sp.lo, sp.hi);
  // the gap oracle agrees with the naive one on a short text
  for (std::size_t n = 1; n <= 4; ++n)
    EXPECT_EQ(oracle::recurrence_by_gaps(text.substr(0, 200), n),
              oracle::recurrence(text.substr(0, 200), oracle::factor_set(text.substr(0, 200), n), n));
  auto s0 = check_recurrence_ub(*fam, *src, 0, 1'000'000);
  EXPECT_TRUE(s0.report.ok());
  ASSERT_EQ(s0.values.size(), 19u);
  for (const auto& [n, v] : s0.values) {
    EXPECT_EQ(v, oracle::recurrence_by_gaps(text, n)) << n;
    EXPECT_LE(v, 3u * 900u);
  }
  auto s1 = check_recurrence_ub(*fam, *src, 1, 1'000'000);
  EXPECT_TRUE(s1.report.ok());
  ASSERT_FALSE(s1.values.empty());
  EXPECT_EQ(s1.values.front().first, 20u);
  for (std::size_t k = 0; k < s1.values.size(); k += 40)
    EXPECT_EQ(s1.values[k].second, oracle::recurrence_by_gaps(text, s1.values[k].first));
  EXPECT_EQ(s1.report.count(ClauseStatus::skipped), 1u);
  EXPECT_THROW(check_recurrence_ub(*fam, *src, 2, 1'000'000), PreconditionError);
  EXPECT_EQ(check_recurrence_ub(*fam, *src, 0, 100).report.count(ClauseStatus::skipped), 1u);
}

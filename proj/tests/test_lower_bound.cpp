#include <gtest/gtest.h>

#include <map>
#include <set>

#include <lefgrowth/lower_bound.hpp>
#include <lefgrowth/quotient.hpp>

#include "oracles.hpp"

using namespace lefg;

namespace {

class LowerBoundTest : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    ss_ = make_subshift(fibonacci_source());
    s_ = new GeneratorSet(base_generating_set(*ss_, 6));
    text_ = new oracle::Text{ss_->window(-4000, 4000), -4000};
  }
  static void TearDownTestSuite() {
    delete s_;
    delete text_;
    ss_.reset();
  }

  static std::shared_ptr<Subshift> ss_;
  static GeneratorSet* s_;
  static oracle::Text* text_;
};

std::shared_ptr<Subshift> LowerBoundTest::ss_;
GeneratorSet* LowerBoundTest::s_ = nullptr;
oracle::Text* LowerBoundTest::text_ = nullptr;

// the two half-size cylinders and ladder length of an f_W split
struct Split {
  std::string zu, zv;
  int s;
};

Split split(const std::string& w, int C0) {
  int m = static_cast<int>(w.size() / 2);
  int C = (m + C0) % 2 == 0 ? C0 : C0 - 1;
  return {w.substr(0, static_cast<std::size_t>(m + C + 1)), w.substr(static_cast<std::size_t>(m - C)), (m - C - 2) / 2};
}

}  // namespace

TEST_F(LowerBoundTest, Constants) {
  EXPECT_NEAR(lower_bound_constant(), 4.0943445622221 / 9.0, 1e-12);  // ln 60
  // R(4) = 11 for Fibonacci: 11 - 1 = 10, half is 5
  EXPECT_DOUBLE_EQ(disjointness_radius(*ss_), 5.0);
  EXPECT_EQ(compute_C0(*ss_), 6);
}

TEST_F(LowerBoundTest, CylindersAboveTheRadiusAreFiveDisjoint) {
  for (int m = 5; m <= 9; ++m)
    for (const auto& w : ss_->level(m).words) {
      EXPECT_TRUE(check_disjoint(*ss_, CenteredWord(w))) << w;
      // σ^i U, |i| <= 2: no point of x lies in two of them
      for (std::int64_t k = -1000; k <= 1000; ++k) {
        int hits = 0;
        for (int i = -2; i <= 2; ++i) hits += text_->matches(k - i, w);
        ASSERT_LE(hits, 1) << w << " " << k;
      }
    }
}

TEST_F(LowerBoundTest, PeriodicWordsFailDisjointness) {
  auto per = make_subshift(std::make_shared<PeriodicSource>(Alphabet("ab"), "ab"));
  EXPECT_FALSE(check_disjoint(*per, CenteredWord("aba")));
}

TEST_F(LowerBoundTest, GreedyFamilyMeetsItsBound) {
  for (int m = 5; m <= 14; ++m) {
    auto fam = greedy_dcyl(*ss_, m);
    const std::size_t p = static_cast<std::size_t>(2 * m - 7) + 1;
    EXPECT_GE(fam.members.size(), (p + 8) / 9) << m;
    EXPECT_TRUE(verify_family(*ss_, fam));
    std::set<std::string> coarse;
    for (std::int64_t k = -3000; k <= 3000; ++k)
      coarse.insert(text_->s.substr(static_cast<std::size_t>(k - (m - 4) - text_->base), static_cast<std::size_t>(2 * m - 7)));
    EXPECT_EQ(fam.covered, coarse.size());
    for (std::int64_t k = -3000; k <= 3000; ++k) {
      int hits = 0;
      for (const auto& u : fam.members)
        for (int i = -2; i <= 2; ++i) hits += text_->matches(k - i, u.word);
      ASSERT_LE(hits, 1) << "m = " << m << ", k = " << k;
    }
  }
  EXPECT_THROW(greedy_dcyl(*ss_, 4), PreconditionError);
}

TEST_F(LowerBoundTest, GreedyPicksLexicographically) {
  auto fam = greedy_dcyl(*ss_, 8);
  ASSERT_FALSE(fam.members.empty());
  EXPECT_EQ(fam.members.front().word, ss_->level(8).words.front());
}

TEST_F(LowerBoundTest, BaseSetShape) {
  std::size_t want = 0;
  for (int m = 6; m <= 12; ++m) want += 4 * static_cast<std::size_t>(2 * m + 2);
  EXPECT_EQ(s_->size(), want);
  for (const auto& g : s_->elements()) EXPECT_TRUE(is_valid(g).valid);
  EXPECT_THROW(base_generating_set(*ss_, 6, {5, 8}), PreconditionError);
  EXPECT_THROW(base_generating_set(*ss_, 4), PreconditionError);
}

TEST_F(LowerBoundTest, BaseCaseWordsAreSingleLetters) {
  FWordBuilder b(*ss_, *s_, 6);
  for (int m = 6; m <= 12; ++m)
    for (const auto& w : ss_->level(m).words)
      for (int i = -1; i <= 1; ++i) {
        const auto& word = b.word(CenteredWord(w), i);
        ASSERT_EQ(word.length(), 1u);
        EXPECT_EQ(evaluate_word(*s_, word), make_fU(*ss_, CenteredWord(w), i));
      }
}

TEST_F(LowerBoundTest, SubBaseCylindersUseRefinements) {
  FWordBuilder b(*ss_, *s_, 6);
  for (const auto& w : ss_->level(5).words) {
    const auto& word = b.word(CenteredWord(w));
    std::size_t refinements = 0;
    for (const auto& v : ss_->level(6).words) refinements += v.substr(1, 11) == w;
    EXPECT_EQ(word.length(), refinements);
    EXPECT_EQ(evaluate_word(*s_, word), make_fU(*ss_, CenteredWord(w)));
  }
}

TEST_F(LowerBoundTest, RecursiveWordsEvaluateToFW) {
  FWordBuilder b(*ss_, *s_, 6);
  WordEvaluator eval(*s_);
  std::map<std::string, std::size_t> length;
  for (int m = 6; m <= 12; ++m)
    for (const auto& w : ss_->level(m).words) length[w] = 1;
  for (int m = 13; m <= 26; ++m)
    for (const auto& w : ss_->level(m).words) {
      const auto& word = b.word(CenteredWord(w));
      auto g = eval(word);
      EXPECT_EQ(g, make_fU(*ss_, CenteredWord(w))) << w;
      auto pred = [t = text_, w](std::int64_t k) { return t->matches(k, w); };
      auto got = evaluate_range(g, -1500, 1500);
      auto ref = oracle::f_of(pred);
      for (std::int64_t n = -1500; n <= 1500; ++n) ASSERT_EQ(got[static_cast<std::size_t>(n + 1500)], ref(n)) << w;
      // 2|U| + 2|V| + four ladders of s tau-conjugations on two letters each side
      auto sp = split(w, 6);
      EXPECT_EQ(word.length(), 2 * length.at(sp.zu) + 2 * length.at(sp.zv) + 16 * static_cast<std::size_t>(sp.s)) << w;
      length[w] = word.length();
    }
}

TEST_F(LowerBoundTest, ShiftedWordsAreConjugates) {
  FWordBuilder b(*ss_, *s_, 6);
  for (const auto& w : ss_->level(15).words)
    for (int i : {-1, 1}) {
      const auto& word = b.word(CenteredWord(w), i);
      EXPECT_EQ(word.length(), b.word(CenteredWord(w)).length() + 4);
      EXPECT_EQ(evaluate_word(*s_, word), make_fU(*ss_, CenteredWord(w), i));
    }
}

TEST_F(LowerBoundTest, Alt5BlockHasOrder60) {
  auto fam = greedy_dcyl(*ss_, 8);
  auto blk = build_delta_U(*ss_, *s_, fam.members.front(), 6);
  ASSERT_EQ(blk.elements.size(), 60u);
  // the abstract group generated by (0 1 2), (1 2 3), (2 3 4) in S_5 has order 60
  std::set<std::vector<int>> group{{0, 1, 2, 3, 4}};
  std::vector<std::vector<int>> gens{{1, 2, 0, 3, 4}, {0, 2, 3, 1, 4}, {0, 1, 3, 4, 2}};
  for (bool grew = true; grew;) {
    grew = false;
    for (auto g : std::vector<std::vector<int>>(group.begin(), group.end()))
      for (const auto& s : gens) {
        std::vector<int> h(5);
        for (int k = 0; k < 5; ++k) h[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(g[static_cast<std::size_t>(k)])];
        grew |= group.insert(h).second;
      }
  }
  EXPECT_EQ(group.size(), blk.elements.size());
  std::set<std::size_t> hashes;
  for (const auto& g : blk.elements) {
    hashes.insert(g.hash());
    EXPECT_TRUE(support(g).subset_of(blk.support));
    EXPECT_EQ(evaluate_word(*s_, blk.element_words[static_cast<std::size_t>(&g - blk.elements.data())]), g);
  }
  EXPECT_EQ(hashes.size(), 60u);
  // every element is reached within the diameter of the Cayley graph
  for (auto d : blk.block_distance) EXPECT_LE(d, 60);
}

TEST_F(LowerBoundTest, SingleBlockObstruction) {
  auto fam = greedy_dcyl(*ss_, 8);
  auto blk = build_delta_U(*ss_, *s_, fam.members.front(), 6);
  GeneratorSet t(*ss_);
  for (int i = 0; i < 3; ++i) t.add("g" + std::to_string(i), blk.generators[static_cast<std::size_t>(i)]);
  int need = 0;
  for (auto d : blk.block_distance) need = std::max(need, d);
  const int n = 2 * need, r = (3 * n + 1) / 2;
  auto q = build_quotient(*ss_, t, r);
  auto cert = certify_local_embedding(t, q, n, 100000);
  EXPECT_EQ(cert.ball_size, 60u);
  auto rep = direct_product_obstruction({blk}, q, cert);
  EXPECT_EQ(rep.k, 1u);
  EXPECT_EQ(rep.max_element_length, static_cast<std::size_t>(need));
  EXPECT_NEAR(rep.log_order_lower, std::log(60.0), 1e-12);
  EXPECT_NEAR(rep.log_order_upper, std::lgamma(double(q.M) + 1), 1e-6);
  // a radius below twice the block diameter proves nothing
  auto small = certify_local_embedding(t, q, n - 1, 100000);
  EXPECT_THROW(direct_product_obstruction({blk}, q, small), PreconditionError);
}

TEST_F(LowerBoundTest, LowerGrowthRows) {
  auto g = growth_lower_datapoints(*ss_, *s_, 6, {6, 7, 8});
  ASSERT_FALSE(g.table.empty());
  const auto& row = g.table.rows().back();
  int m = g.m_values.back();
  EXPECT_NEAR(row.value, std::log(60.0) / 9.0 * double(2 * m - 7 + 1), 1e-12);
  EXPECT_THROW(growth_lower_datapoints(*ss_, *s_, 6, {}), PreconditionError);
}

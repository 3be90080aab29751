#include <gtest/gtest.h>

#include <set>

#include <lefgrowth/lower_bound.hpp>
#include <lefgrowth/quotient.hpp>

#include "oracles.hpp"

using namespace lefg;

namespace {

class QuotientTest : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    ss_ = make_subshift(fibonacci_source());
    s_ = new GeneratorSet(base_generating_set(*ss_, 6, {6, 6}));
    text_ = new oracle::Text{ss_->window(-500, 20000), -500};
  }
  static void TearDownTestSuite() {
    delete s_;
    delete text_;
    ss_.reset();
  }

  std::string around(std::int64_t centre, std::int64_t radius) const {
    return text_->s.substr(static_cast<std::size_t>(centre - radius - text_->base), static_cast<std::size_t>(2 * radius + 1));
  }

  // least admissible M found by direct scanning
  std::int64_t brute_M(int C1, int r, std::int64_t from) const {
    const std::int64_t k = std::int64_t(C1) * (r + 1), C = std::int64_t(C1) * (2 * r + 1);
    const std::size_t all = static_cast<std::size_t>(2 * k + 2);  // Sturmian: p(n) = n + 1
    std::set<std::string> seen;
    const auto centre = around(0, C);
    for (std::int64_t M = 1;; ++M) {
      seen.insert(around(M, k));
      if (M >= from && seen.size() == all && around(M, C) == centre) return M;
    }
  }

  static std::shared_ptr<Subshift> ss_;
  static GeneratorSet* s_;
  static oracle::Text* text_;
};

std::shared_ptr<Subshift> QuotientTest::ss_;
GeneratorSet* QuotientTest::s_ = nullptr;
oracle::Text* QuotientTest::text_ = nullptr;

}  // namespace

TEST_F(QuotientTest, C1OfTheBaseSet) {
  // f of sigma^{+-1} of a 6-cylinder reads coordinates -8..8; every shift is at most 2
  EXPECT_EQ(compute_C1(*s_), 8);
}

TEST_F(QuotientTest, FindMMatchesBruteForce) {
  for (int r = 1; r <= 3; ++r) {
    auto res = find_M(*ss_, *s_, r);
    EXPECT_EQ(res.lower, 80 * r);
    EXPECT_GE(res.M, res.lower);
    EXPECT_LE(res.M, res.upper);
    EXPECT_EQ(res.M, brute_M(8, r, 80 * r)) << r;
  }
  EXPECT_THROW(find_M(*ss_, *s_, 0), PreconditionError);
}

TEST_F(QuotientTest, PermutationsReduceTheOrbitAction) {
  auto q = build_quotient(*ss_, *s_, 1);
  ASSERT_EQ(q.perms.size(), s_->size());
  EXPECT_EQ(q.source_digest, ss_->digest());
  for (std::size_t c = 0; c < s_->size(); ++c) {
    const auto& name = s_->names()[c];
    auto word = name.substr(name.find('[') + 1, 13);
    auto pred = [t = text_, word](std::int64_t k) { return t->matches(k, word); };
    oracle::Map ref;
    if (name.rfind("h[", 0) == 0) ref = oracle::h_of(pred);
    else if (name.rfind("f-1", 0) == 0) ref = oracle::f_of(oracle::shifted(pred, -1));
    else if (name.rfind("f+1", 0) == 0) ref = oracle::f_of(oracle::shifted(pred, 1));
    else ref = oracle::f_of(pred);
    std::vector<char> hit(static_cast<std::size_t>(q.M), 0);
    for (std::int64_t n = 1; n <= q.M; ++n) {
      auto img = ((ref(n) % q.M) + q.M) % q.M;
      ASSERT_EQ(q.perms[c][static_cast<std::size_t>(n % q.M)], img) << name << " " << n;
      hit[static_cast<std::size_t>(img)] = 1;
    }
    EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), q.M);
  }
  EXPECT_FALSE(quotient_mismatch(*s_, q).has_value());
}

TEST_F(QuotientTest, PermutationHelpers) {
  Perm p{2, 0, 1}, q{1, 0, 2};
  EXPECT_TRUE(is_permutation(p));
  EXPECT_FALSE(is_permutation(Perm{0, 0, 1}));
  EXPECT_EQ(compose_perm(p, invert(p)), (Perm{0, 1, 2}));
  // (p o q)(i) = p(q(i))
  EXPECT_EQ(compose_perm(p, q), (Perm{0, 2, 1}));
  EXPECT_EQ(oracle::cycle_type(p), (std::vector<std::int64_t>{3}));
}

TEST_F(QuotientTest, LocalColourIsomorphism) {
  for (int r = 1; r <= 2; ++r) {
    auto q = build_quotient(*ss_, *s_, r);
    auto rep = local_colour_iso_check(*s_, q, r);
    EXPECT_TRUE(rep.ok) << rep.reason;
    EXPECT_EQ(rep.balls_checked, static_cast<std::size_t>(q.M));
  }
}

TEST_F(QuotientTest, SchreierBallIsSymmetric) {
  auto b = schreier_ball(*s_, 17, 2);
  EXPECT_TRUE(std::binary_search(b.vertices.begin(), b.vertices.end(), 17));
  for (const auto& [v, w, c] : b.edges) {
    EXPECT_TRUE(std::binary_search(b.vertices.begin(), b.vertices.end(), v));
    EXPECT_TRUE(std::binary_search(b.vertices.begin(), b.vertices.end(), w));
  }
}

TEST_F(QuotientTest, CertifiesSmallBalls) {
  auto q = build_quotient(*ss_, *s_, 3);
  auto cert = certify_local_embedding(*s_, q, 2, 100000);
  EXPECT_TRUE(cert.injective);
  EXPECT_TRUE(cert.multiplicative);
  EXPECT_EQ(cert.collisions, 0u);
  EXPECT_EQ(cert.ball_size, word_length_ball(*s_, 2, 100000).size());
  EXPECT_EQ(cert.pairs_examined, cert.ball_size * cert.ball_size);
  EXPECT_GT(cert.pairs_checked, cert.ball_size);
  EXPECT_THROW(certify_local_embedding(*s_, q, 3, 100000), PreconditionError);  // 3 > floor(2*3/3)
}

TEST_F(QuotientTest, BallBudgetIsReported) {
  auto q = build_quotient(*ss_, *s_, 3);
  EXPECT_THROW(certify_local_embedding(*s_, q, 2, 50), BudgetError);
}

TEST_F(QuotientTest, CorruptedQuotientsAreCaught) {
  auto q = build_quotient(*ss_, *s_, 3);
  // duplicate an image: no longer a permutation
  auto bad = q;
  bad.perms[0][1] = bad.perms[0][2];
  EXPECT_THROW(certify_local_embedding(*s_, bad, 1, 100000), CertificateFailure);
  // swap two images of a moved point: still a permutation but no longer the reduction
  auto swapped = q;
  auto& p = swapped.perms[0];
  std::size_t i = 0;
  while (p[i] == static_cast<std::int32_t>(i)) ++i;
  std::swap(p[i], p[(i + 1) % p.size()]);
  auto witness = quotient_mismatch(*s_, swapped);
  ASSERT_TRUE(witness.has_value());
  EXPECT_NE(witness->find(s_->names()[0]), std::string::npos);
  EXPECT_FALSE(local_colour_iso_check(*s_, swapped, 3).ok);
}

TEST_F(QuotientTest, UpperGrowthRows) {
  auto g = growth_upper_datapoints(*ss_, *s_, {3, 1, 2, 3});
  ASSERT_EQ(g.degree.rows().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    int r = static_cast<int>(i) + 1;
    EXPECT_EQ(g.degree.rows()[i].n, (2 * r) / 3);
    EXPECT_EQ(g.degree.rows()[i].value, double(brute_M(8, r, 80 * r)));
    EXPECT_NEAR(g.log_order.rows()[i].value, std::lgamma(g.degree.rows()[i].value + 1), 1e-6);
  }
  EXPECT_THROW(growth_upper_datapoints(*ss_, *s_, {}), PreconditionError);
}

TEST_F(QuotientTest, BudgetExhaustionNeverUnderstatesTheDegree) {
  Budget b;
  b.window = 250;
  auto small = make_subshift(fibonacci_source(b));
  auto s = base_generating_set(*small, 6, {6, 6});
  EXPECT_THROW(build_quotient(*small, s, 3), BudgetError);
  // R(240) is out of reach as well, so no row can be reported
  EXPECT_THROW(growth_upper_datapoints(*small, s, {3}), BudgetError);
}

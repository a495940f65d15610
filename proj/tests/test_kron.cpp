#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vocabflow/kron.hpp"
#include "vocabflow/vocab.hpp"

using namespace vocabflow;

namespace {

struct Scan {
  long long p;
  long long q;
};

// Linear scan over q with p = round(t + q sqrt2), in long double.
Scan scan_smallest_q(double t, double eps, long long q_min = 0) {
  const long double r2 = std::sqrt(2.0L);
  for (long long q = q_min;; ++q) {
    long long p = std::llround(static_cast<long double>(t) + q * r2);
    if (p < 0) p = 0;
    const long double r = p - q * r2 - t;
    if (std::fabs(static_cast<double>(r)) < eps) return {p, q};
  }
}

std::string tokens(const std::vector<Word>& words) {
  std::string out;
  for (const Word& w : words) out += (out.empty() ? "" : " ") + format_word(w);
  return out;
}

}  // namespace

TEST(Kronecker, IntegerTimeUsesNoRootWords) {
  const KroneckerPair pq = kronecker_pq(1.0, 0.01);
  EXPECT_EQ(pq.p, 1);
  EXPECT_EQ(pq.q, 0);
  EXPECT_EQ(pq.residual, 0.0);
}

TEST(Kronecker, HalfAtCoarseTolerance) {
  const KroneckerPair pq = kronecker_pq(0.5, 0.1);
  EXPECT_EQ(pq.p, 2);
  EXPECT_EQ(pq.q, 1);
  EXPECT_NEAR(pq.residual, 0.08578643762690485, 1e-15);
}

TEST(Kronecker, AgreesWithLinearScan) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 300; ++k) {
    const double t = 10.0 - u(rng);
    const double eps = k % 3 == 0 ? 1e-2 : (k % 3 == 1 ? 1e-3 : 1e-4);
    const Scan s = scan_smallest_q(t, eps);
    const KroneckerPair pq = kronecker_pq(t, eps);
    EXPECT_EQ(pq.q, s.q) << "t=" << t << " eps=" << eps;
    EXPECT_EQ(pq.p, s.p) << "t=" << t << " eps=" << eps;
  }
}

TEST(Kronecker, StrictModeNeedsPositiveQ) {
  KroneckerOptions strict;
  strict.strict = true;
  const KroneckerPair pq = kronecker_pq(1.0, 0.01, strict);
  const Scan s = scan_smallest_q(1.0, 0.01, 1);
  EXPECT_GE(pq.q, 1);
  EXPECT_GE(pq.p, 1);
  EXPECT_EQ(pq.q, s.q);
  EXPECT_EQ(pq.p, s.p);
}

TEST(Kronecker, ContractAtFineTolerance) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double t = 10.0 - u(rng);
    const KroneckerPair pq = kronecker_pq(t, 1e-6);
    const long double r = pq.p - pq.q * std::sqrt(2.0L) - t;
    EXPECT_LT(std::fabs(static_cast<double>(r)), 1e-6);
    EXPECT_GE(pq.p, 0);
    EXPECT_GE(pq.q, 0);
  }
}

TEST(Kronecker, Deterministic) {
  for (double t : {0.3, 1.7, 9.99}) {
    EXPECT_EQ(kronecker_pq(t, 1e-5), kronecker_pq(t, 1e-5));
  }
}

TEST(Kronecker, HalvingEpsNeverCheapens) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int k = 0; k < 200; ++k) {
    const double t = u(rng);
    double eps = 0.1;
    std::uint64_t prev = kronecker_pq(t, eps).word_count();
    for (int h = 0; h < 10; ++h) {
      eps *= 0.5;
      const std::uint64_t cur = kronecker_pq(t, eps).word_count();
      EXPECT_GE(cur, prev);
      prev = cur;
    }
  }
}

TEST(Kronecker, SignedPairsAreNoLonger) {
  KroneckerOptions sgn;
  sgn.signed_pairs = true;
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int k = 0; k < 200; ++k) {
    const double t = u(rng);
    const KroneckerPair a = kronecker_pq(t, 1e-4);
    const KroneckerPair b = kronecker_pq(t, 1e-4, sgn);
    EXPECT_LE(std::llabs(b.q), a.q);
    const long double r = b.p - b.q * std::sqrt(2.0L) - t;
    EXPECT_LT(std::fabs(static_cast<double>(r)), 1e-4);
  }
}

TEST(Kronecker, BadArguments) {
  EXPECT_THROW(kronecker_pq(0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(kronecker_pq(-1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(kronecker_pq(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(kronecker_pq(1.0, 1e-13), ResourceError);
}

TEST(ExpandTime, UnitTranslation) {
  EXPECT_EQ(tokens(expand_time(Basis::translate(0), Sign::Plus, 1.0, 0.3)), "T+1@1");
}

TEST(ExpandTime, HalfTranslation) {
  const auto words = expand_time(Basis::translate(0), Sign::Plus, 0.5, 0.1);
  EXPECT_EQ(tokens(words), "T+1@1 T+1@1 T-1@s");
  Vector x = Vector::Zero(1);
  EXPECT_NEAR(apply_sentence({1, words}, x)[0], 0.5857864376269049, 1e-15);
}

TEST(ExpandTime, NegativeTimeFlipsSign) {
  EXPECT_EQ(tokens(expand_time(Basis::linear(0, 0), Sign::Plus, -1.0, 0.1)), "L-1.1@1");
}

TEST(ExpandTime, ZeroIsEmpty) { EXPECT_TRUE(expand_time(Basis::translate(1), Sign::Plus, 0.0, 0.1).empty()); }

TEST(ExpandTime, TranslationErrorIsResidual) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 50; ++k) {
    const double c = u(rng);
    if (c == 0.0) continue;
    const auto words = expand_time(Basis::translate(0), Sign::Plus, c, 1e-3);
    const KroneckerPair pq = kronecker_pq(std::fabs(c), 1e-3);
    const double moved = apply_sentence({1, words}, Vector::Zero(1))[0];
    // Thousands of sequential additions: allow summation roundoff.
    EXPECT_NEAR(moved - c, c < 0.0 ? -pq.residual : pq.residual, 1e-10);
  }
}

TEST(BalancedExpansion, SameWordsBoundedPartials) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double c = u(rng);
    const auto plain = expand_time(Basis::neg_part(0), Sign::Plus, c, 1e-4);
    const auto bal = balanced_expansion(Basis::neg_part(0), Sign::Plus, c, 1e-4);
    ASSERT_EQ(plain.size(), bal.size());
    long long ones_a = 0, roots_a = 0, ones_b = 0, roots_b = 0;
    double partial = 0.0;
    double widest = 0.0;
    for (std::size_t i = 0; i < bal.size(); ++i) {
      (plain[i].tau == Tau::One ? ones_a : roots_a) += plain[i].sign == Sign::Plus ? 1 : -1;
      (bal[i].tau == Tau::One ? ones_b : roots_b) += bal[i].sign == Sign::Plus ? 1 : -1;
      partial += bal[i].signed_time();
      widest = std::max(widest, std::fabs(partial));
    }
    EXPECT_EQ(ones_a, ones_b);
    EXPECT_EQ(roots_a, roots_b);
    EXPECT_LE(widest, std::fabs(c) + 1.5);
    Vector x(1);
    x << -1.0;
    EXPECT_NEAR(apply_sentence({1, bal}, x)[0], -std::exp(c), 1e-3 * std::exp(std::fabs(c)));
  }
}

#include <gtest/gtest.h>

#include "hyperlab/counts.hpp"
#include "hyperlab/oracle.hpp"

using namespace hyperlab;

TEST(Oracle, Examples) {
  const auto m = check_prime(7);
  const FieldElement lam(-1, m);
  EXPECT_EQ(oracle::sigma_naive(ScalarSet::of(m, {1, 6}), TranslateSet::of(m, {{0, 0}}), lam), 2U);
  EXPECT_EQ(oracle::energy_naive(TranslateSet::of(m, {{1, 0}, {2, 0}})), 6U);
  EXPECT_EQ(oracle::t3_naive(TranslateSet::of(m, {{0, 0}, {1, 1}})), 20U);
  EXPECT_EQ(oracle::q_naive(TranslateSet::of(m, {{0, 0}, {1, 1}})), 8U);
  for (const TranslateSet& one : {TranslateSet::of(m, {{3, 5}})}) {
    EXPECT_EQ(oracle::energy_naive(one), 1U);
    EXPECT_EQ(oracle::t3_naive(one), 1U);
    EXPECT_EQ(oracle::q_naive(one), 1U);
  }
  const auto rich = oracle::mk_exhaustive(ScalarSet::of(m, {1, 6}), 2, lam);
  EXPECT_NE(std::find(rich.witnesses.begin(), rich.witnesses.end(), Translate{FieldElement(0, m), FieldElement(0, m)}),
            rich.witnesses.end());
  EXPECT_EQ(rich.count, rich.witnesses.size());
}

TEST(Oracle, Budgets) {
  const auto big = check_prime(101);
  EXPECT_THROW(oracle::t3_naive(random_translate_set(big, oracle::kT3MaxH + 1, 1)), ResourceLimit);
  EXPECT_NO_THROW(oracle::t3_naive(random_translate_set(big, oracle::kT3MaxH, 1)));
  EXPECT_THROW(oracle::energy_naive(random_translate_set(big, oracle::kEnergyMaxH + 1, 1)), ResourceLimit);
  EXPECT_THROW(oracle::q_naive(random_translate_set(big, oracle::kQMaxH + 1, 1)), ResourceLimit);
  EXPECT_THROW(oracle::mk_exhaustive(ScalarSet::of(big, {1}), 2, FieldElement(1, big)), ResourceLimit);
  EXPECT_THROW(oracle::sigma_naive(ScalarSet::of(big, {1}), TranslateSet(big), FieldElement(0, big)),
               InvalidArgument);
}

// Fast kernels against the naive loops on seeded random instances.
TEST(Oracle, KernelsAgree) {
  for (u64 seed = 0; seed < 60; ++seed) {
    const auto m = check_prime(seed % 2 ? 61 : 101);
    const ScalarSet a = random_scalar_set(m, 1 + seed % 12, seed);
    const TranslateSet h = random_translate_set(m, 1 + seed % 32, seed + 1000);
    const TranslateSet small = random_translate_set(m, 1 + seed % 10, seed + 2000);
    const FieldElement lam = FieldElement::from_residue(1 + seed * 13 % (m.value() - 1), m);
    EXPECT_EQ(sigma(a, h, lam), oracle::sigma_naive(a, h, lam)) << seed;
    EXPECT_EQ(t_k(h, 2), oracle::energy_naive(h)) << seed;
    EXPECT_EQ(t_k(small, 3), oracle::t3_naive(small)) << seed;
    EXPECT_EQ(q_rect(h), oracle::q_naive(h)) << seed;
  }
}

TEST(Oracle, RichHyperbolaeAgree) {
  for (u64 seed = 0; seed < 10; ++seed) {
    const auto m = check_prime(seed % 2 ? 31 : 61);
    const ScalarSet a = random_scalar_set(m, 2 + seed % 7, seed);
    const FieldElement lam = FieldElement::from_residue(1 + seed % (m.value() - 1), m);
    for (u64 k = 2; k <= a.size(); ++k) {
      const auto fast = rich_hyperbolae(a, k, lam, RichMode::kPairs, nullptr, true);
      const auto slow = oracle::mk_exhaustive(a, k, lam);
      EXPECT_EQ(fast.count, slow.count);
      EXPECT_EQ(fast.witnesses, slow.witnesses);
    }
  }
}

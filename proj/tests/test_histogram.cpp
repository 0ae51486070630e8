#include <gtest/gtest.h>

#include <cstdlib>

#include "hyperlab/histogram.hpp"

using namespace hyperlab;

TEST(CountHistogram, MassesAndSquares) {
  ScalarHistogram h;
  h.add(3);
  h.add(3);
  h.add(5, 4);
  h.add(9, 0);
  EXPECT_EQ(h.at(3), 2U);
  EXPECT_EQ(h.at(9), 0U);
  EXPECT_EQ(h.support_size(), 2U);
  EXPECT_EQ(h.total_mass(), 6U);
  EXPECT_EQ(h.sum_of_squares(), 20U);
  EXPECT_EQ(h.sorted_entries(), (std::vector<std::pair<u64, u64>>{{3, 2}, {5, 4}}));
}

TEST(CountHistogram, MergeIsAddition) {
  ScalarHistogram x, y;
  x.add(1, 2);
  y.add(1, 3);
  y.add(2);
  x.merge(y);
  EXPECT_EQ(x.at(1), 5U);
  EXPECT_EQ(x.at(2), 1U);
}

TEST(ShardedHistogram, IndependentOfWorkerCount) {
  auto body = [](std::size_t i, ScalarHistogram& out) {
    for (std::size_t j = 0; j < 50; ++j) out.add((i * j) % 37);
  };
  const auto one = sharded_histogram<ScalarHistogram>(101, 1, body).sorted_entries();
  for (unsigned w : {2U, 3U, 8U, 200U}) {
    EXPECT_EQ(sharded_histogram<ScalarHistogram>(101, w, body).sorted_entries(), one) << w;
  }
  EXPECT_EQ(sharded_histogram<ScalarHistogram>(0, 4, body).support_size(), 0U);
}

TEST(ShardedSum, IndependentOfWorkerCount) {
  auto body = [](std::size_t i) -> u64 { return i * i; };
  for (unsigned w : {1U, 2U, 7U, 16U}) EXPECT_EQ(sharded_sum(1000, w, body), 332833500U) << w;
}

TEST(Budget, TableCheckAndEnvironment) {
  Budget b;
  b.table_mb = 1;
  EXPECT_NO_THROW(b.check_table(16384, "x"));
  try {
    b.check_table(16384 * 2, "x");
    ADD_FAILURE();
  } catch (const ResourceLimit& e) {
    EXPECT_EQ(e.required(), 2U);
    EXPECT_EQ(e.limit(), 1U);
  }
  ::setenv("HYPERLAB_BUDGET_MB", "7", 1);
  EXPECT_EQ(Budget::from_env().table_mb, 7U);
  ::setenv("HYPERLAB_BUDGET_MB", "x7", 1);
  EXPECT_THROW(Budget::from_env(), InvalidArgument);
  ::unsetenv("HYPERLAB_BUDGET_MB");
  EXPECT_EQ(Budget::from_env().table_mb, Budget{}.table_mb);
}

TEST(Rational, LowestTermsAndComparison) {
  const Rational r(6, 4);
  EXPECT_EQ(r.num(), 3U);
  EXPECT_EQ(r.den(), 2U);
  EXPECT_EQ(r.to_string(), "3/2");
  EXPECT_TRUE(r.le_integer(2));
  EXPECT_FALSE(r.le_integer(1));
  EXPECT_TRUE(Rational(4, 2).le_integer(2));
  EXPECT_EQ(Rational(0, 5), Rational(0, 1));
  EXPECT_THROW(Rational(1, 0), DivisionByZero);
  EXPECT_DOUBLE_EQ(Rational(1, 3).to_double(), 1.0 / 3.0);
}

#include <gtest/gtest.h>

#include <array>
#include <random>
#include <set>

#include "hyperlab/moebius.hpp"

using namespace hyperlab;

namespace {

// Hand product of 2x2 integer matrices reduced mod p, independent of MoebiusMap.
using Raw = std::array<i64, 4>;

Raw raw_product(const Raw& x, const Raw& y, i64 p) {
  auto r = [p](i64 v) { return ((v % p) + p) % p; };
  return {r(x[0] * y[0] + x[1] * y[2]), r(x[0] * y[1] + x[1] * y[3]), r(x[2] * y[0] + x[3] * y[2]),
          r(x[2] * y[1] + x[3] * y[3])};
}

Raw raw(const MoebiusMap& m) {
  return {static_cast<i64>(m.a().value()), static_cast<i64>(m.b().value()),
          static_cast<i64>(m.c().value()), static_cast<i64>(m.d().value())};
}

MoebiusMap map_of(PrimeModulus m, i64 a, i64 b, i64 c, i64 d) {
  return {FieldElement(a, m), FieldElement(b, m), FieldElement(c, m), FieldElement(d, m)};
}

Translate tr(PrimeModulus m, i64 a, i64 b) { return {FieldElement(a, m), FieldElement(b, m)}; }

MoebiusMap random_map(std::mt19937_64& rng, PrimeModulus m) {
  for (;;) {
    const i64 p = static_cast<i64>(m.value());
    const i64 a = static_cast<i64>(rng() % m.value()), b = static_cast<i64>(rng() % m.value());
    const i64 c = static_cast<i64>(rng() % m.value()), d = static_cast<i64>(rng() % m.value());
    if (((a * d - b * c) % p + p) % p != 0) return map_of(m, a, b, c, d);
  }
}

}  // namespace

TEST(EmbedTranslate, Examples) {
  const auto m = check_prime(7);
  const MoebiusMap e0 = embed_translate(tr(m, 0, 0));
  EXPECT_EQ(raw(e0), (Raw{0, 1, 6, 0}));
  EXPECT_EQ(e0.det().value(), 1U);
  const MoebiusMap e1 = embed_translate(tr(m, 1, 2));
  EXPECT_EQ(raw(e1), (Raw{6, 3, 6, 2}));
  EXPECT_EQ(e1.det().value(), 1U);
}

TEST(EmbedTranslate, DeterminantOneExhaustively) {
  for (i64 p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    const auto m = check_prime(p);
    for (i64 a = 0; a < p; ++a) {
      for (i64 b = 0; b < p; ++b) ASSERT_EQ(embed_translate(tr(m, a, b)).det().value(), 1U);
    }
  }
}

TEST(EmbedTranslate, EvaluatesTheTranslate) {
  const auto m = check_prime(31);
  for (i64 a = 0; a < 31; ++a) {
    for (i64 b = 0; b < 31; ++b) {
      for (i64 x = 0; x < 31; ++x) {
        if (x == b) continue;
        const FieldElement expected = FieldElement(a, m) + FieldElement(b - x, m).inverse();
        const auto got = evaluate(embed_translate(tr(m, a, b)), ProjectiveValue::finite(FieldElement(x, m)));
        ASSERT_EQ(got, ProjectiveValue::finite(expected));
      }
    }
  }
}

TEST(Compose, IdentityAndInverse) {
  const auto m = check_prime(101);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const MoebiusMap g = random_map(rng, m);
    EXPECT_EQ(compose(g, MoebiusMap::identity(m)), g);
    EXPECT_EQ(compose(MoebiusMap::identity(m), g), g);
    EXPECT_EQ(canonicalize(compose(g, invert(g))), MoebiusMap::identity(m));
    EXPECT_EQ(compose(g, invert(g)), MoebiusMap::identity(m));
  }
}

TEST(Compose, MatchesHandProductAndDetIsMultiplicative) {
  const auto m = check_prime(1009);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const MoebiusMap g = random_map(rng, m), h = random_map(rng, m);
    EXPECT_EQ(raw(compose(g, h)), raw_product(raw(g), raw(h), 1009));
    EXPECT_EQ(compose(g, h).det(), g.det() * h.det());
  }
}

TEST(Invert, Examples) {
  const auto m = check_prime(7);
  EXPECT_EQ(invert(MoebiusMap::identity(m)), MoebiusMap::identity(m));
  EXPECT_EQ(raw(invert(map_of(m, 0, 1, -1, 0))), (Raw{0, 6, 1, 0}));
  // det = 1: adjugate.
  const MoebiusMap e = embed_translate(tr(m, 1, 2));
  EXPECT_EQ(invert(e), map_of(m, 2, -3, 6 * -1 + 7, 6));
}

TEST(Invert, RoundTripOnPoints) {
  const auto m = check_prime(101);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const MoebiusMap g = random_map(rng, m);
    for (int j = 0; j < 100; ++j) {
      const auto x = ProjectiveValue::finite(FieldElement::from_residue(rng() % 101, m));
      EXPECT_EQ(evaluate(invert(g), evaluate(g, x)), x);
    }
    const auto inf = ProjectiveValue::infinity(m);
    EXPECT_EQ(evaluate(invert(g), evaluate(g, inf)), inf);
  }
}

TEST(Moebius, SingularMatrixRejected) {
  const auto m = check_prime(7);
  EXPECT_THROW(map_of(m, 1, 2, 2, 4), StructuralError);
  EXPECT_THROW(MoebiusMap(FieldElement(1, m), FieldElement(0, m), FieldElement(0, m),
                          FieldElement(1, check_prime(11))),
               StructuralError);
}

TEST(Canonicalize, Examples) {
  const auto m = check_prime(7);
  EXPECT_EQ(canonicalize(map_of(m, 2, 0, 0, 2)), MoebiusMap::identity(m));
  const MoebiusMap g = map_of(m, 3, 1, 4, 5);
  EXPECT_EQ(canonicalize(g), canonicalize(map_of(m, -3, -1, -4, -5)));
  EXPECT_EQ(raw(canonicalize(map_of(m, 0, 3, 5, 1))), (Raw{0, 1, 4, 5}));
}

TEST(Canonicalize, IdempotentAndConstantOnScalarOrbits) {
  const auto m = check_prime(31);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const MoebiusMap g = random_map(rng, m);
    const MoebiusMap c = canonicalize(g);
    EXPECT_EQ(canonicalize(c), c);
    for (i64 s = 1; s < 31; ++s) {
      const FieldElement f(s, m);
      const MoebiusMap scaled(g.a() * f, g.b() * f, g.c() * f, g.d() * f);
      EXPECT_EQ(canonicalize(scaled), c);
      EXPECT_TRUE(scaled.same_transformation(g));
    }
  }
}

TEST(Evaluate, Examples) {
  const auto m = check_prime(7);
  const auto x1 = ProjectiveValue::finite(FieldElement(1, m));
  EXPECT_EQ(evaluate(embed_translate(tr(m, 0, 0)), x1), ProjectiveValue::finite(FieldElement(6, m)));
  const Translate h = tr(m, 3, 5);
  EXPECT_TRUE(evaluate(embed_translate(h), ProjectiveValue::finite(h.b)).is_infinity());
  EXPECT_EQ(evaluate(embed_translate(h), ProjectiveValue::infinity(m)), ProjectiveValue::finite(h.a));
  EXPECT_TRUE(evaluate(MoebiusMap::identity(m), ProjectiveValue::infinity(m)).is_infinity());
}

TEST(Evaluate, ActionIsAHomomorphismOverAllOfGL2ForTinyP) {
  for (i64 p : {3, 5}) {
    const auto m = check_prime(p);
    std::vector<MoebiusMap> all;
    for (i64 a = 0; a < p; ++a)
      for (i64 b = 0; b < p; ++b)
        for (i64 c = 0; c < p; ++c)
          for (i64 d = 0; d < p; ++d)
            if (((a * d - b * c) % p + p) % p != 0)
              all.push_back(map_of(m, a, b, c, d));
    std::vector<ProjectiveValue> line{ProjectiveValue::infinity(m)};
    for (i64 x = 0; x < p; ++x) line.push_back(ProjectiveValue::finite(FieldElement(x, m)));
    for (const auto& g : all) {
      for (const auto& h : all) {
        const MoebiusMap gh = compose(g, h);
        for (const auto& x : line) ASSERT_EQ(evaluate(gh, x), evaluate(g, evaluate(h, x)));
      }
    }
  }
}

TEST(Evaluate, ActionIsAHomomorphismOnRandomSamplesForLargeP) {
  const auto m = check_prime(1000003);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 10000; ++i) {
    const MoebiusMap g = random_map(rng, m), h = random_map(rng, m);
    const auto x = (i % 10 == 0) ? ProjectiveValue::infinity(m)
                                 : ProjectiveValue::finite(FieldElement::from_residue(rng() % m.value(), m));
    ASSERT_EQ(evaluate(compose(g, h), x), evaluate(g, evaluate(h, x)));
  }
}

TEST(EvaluateTranslate, GeneralNumerator) {
  const auto m = check_prime(11);
  const Translate h = tr(m, 2, 4);
  const FieldElement three(3, m);
  const auto y = evaluate_translate(h, ProjectiveValue::finite(FieldElement(1, m)), three);
  EXPECT_EQ(y, ProjectiveValue::finite(FieldElement(2, m) + three / FieldElement(3, m)));
  EXPECT_TRUE(evaluate_translate(h, ProjectiveValue::finite(h.b), three).is_infinity());
  EXPECT_EQ(evaluate_translate(h, ProjectiveValue::infinity(m), three), ProjectiveValue::finite(h.a));
  EXPECT_THROW(evaluate_translate(h, ProjectiveValue::infinity(m), FieldElement(0, m)), InvalidArgument);
}

TEST(PairQuotient, Examples) {
  const auto m = check_prime(7);
  const Translate h = tr(m, 4, 6);
  EXPECT_EQ(pair_quotient(h, h), MoebiusMap::identity(m));
  EXPECT_EQ(raw(pair_quotient(tr(m, 1, 2), tr(m, 3, 5))), (Raw{5, 0, 4, 3}));
  EXPECT_EQ(raw(compose(embed_translate(tr(m, 1, 2)), invert(embed_translate(tr(m, 3, 5))))), (Raw{5, 0, 4, 3}));
  EXPECT_EQ(pair_quotient(tr(m, 5, 3), tr(m, 2, 3)), map_of(m, 1, 3, 0, 1));
}

TEST(PairQuotient, MatchesGenericChain) {
  const auto m = check_prime(499);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100000; ++i) {
    const Translate h1 = tr(m, static_cast<i64>(rng() % 499), static_cast<i64>(rng() % 499));
    const Translate h2 = tr(m, static_cast<i64>(rng() % 499), static_cast<i64>(rng() % 499));
    ASSERT_EQ(pair_quotient(h1, h2), compose(embed_translate(h1), invert(embed_translate(h2))));
  }
}

TEST(TripleProduct, Examples) {
  const auto m = check_prime(101);
  const Translate h1 = tr(m, 7, 9), h3 = tr(m, 44, 3);
  EXPECT_EQ(triple_product(h1, h1, h3), embed_translate(h3));
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const Translate a = tr(m, static_cast<i64>(rng() % 101), static_cast<i64>(rng() % 101));
    const Translate b = tr(m, static_cast<i64>(rng() % 101), static_cast<i64>(rng() % 101));
    const Translate c = tr(m, static_cast<i64>(rng() % 101), static_cast<i64>(rng() % 101));
    const FieldElement w1 = a.b - b.b, w2 = c.a - b.a;
    EXPECT_EQ(triple_product(a, b, c).c(), -(FieldElement(1, m) + w1 * w2));
  }
}

TEST(TripleProduct, MatchesGenericChain) {
  const auto m = check_prime(1009);
  std::mt19937_64 rng(14);
  for (int i = 0; i < 100000; ++i) {
    const Translate h1 = tr(m, static_cast<i64>(rng() % 1009), static_cast<i64>(rng() % 1009));
    const Translate h2 = tr(m, static_cast<i64>(rng() % 1009), static_cast<i64>(rng() % 1009));
    const Translate h3 = tr(m, static_cast<i64>(rng() % 1009), static_cast<i64>(rng() % 1009));
    ASSERT_EQ(triple_product(h1, h2, h3), compose(pair_quotient(h1, h2), embed_translate(h3)));
  }
}

TEST(Borel, Predicate) {
  const auto m = check_prime(7);
  EXPECT_TRUE(is_borel(MoebiusMap::identity(m)));
  EXPECT_FALSE(is_borel(embed_translate(tr(m, 0, 0))));
  EXPECT_TRUE(is_borel(map_of(m, 1, 3, 0, 1)));
}

TEST(CosetLabel, Examples) {
  const auto m = check_prime(7);
  EXPECT_TRUE(coset_label(map_of(m, 2, 5, 0, 4)).is_infinity());
  EXPECT_EQ(coset_label(map_of(m, 1, 0, 1, 1)), ProjectiveValue::finite(FieldElement(1, m)));
}

TEST(CosetLabel, InvariantUnderRightBorelAndPartitions) {
  const auto m = check_prime(61);
  std::mt19937_64 rng(15);
  std::set<std::pair<bool, u64>> labels;
  for (int i = 0; i < 1000; ++i) {
    const MoebiusMap g = random_map(rng, m);
    MoebiusMap b = random_map(rng, m);
    while (!is_borel(b)) b = random_map(rng, m);
    const auto lg = coset_label(g);
    EXPECT_EQ(coset_label(compose(g, b)), lg);
    labels.insert({lg.is_infinity(), lg.is_infinity() ? 0 : lg.value().value()});
  }
  EXPECT_LE(labels.size(), 62U);
}

TEST(Render, RoundTrip) {
  const auto m = check_prime(101);
  std::mt19937_64 rng(16);
  for (int i = 0; i < 100; ++i) {
    const MoebiusMap g = random_map(rng, m);
    EXPECT_EQ(parse_moebius(render(g)), g);
  }
  EXPECT_EQ(render(map_of(check_prime(7), 0, 1, 6, 0)), "[[0,1],[6,0]] mod 7");
  EXPECT_EQ(parse_moebius("[[ -1, 1 ], [ 1 , 0 ]] mod 7"), map_of(check_prime(7), 6, 1, 1, 0));
  EXPECT_THROW(parse_moebius("[[1,2],[3,4]]"), StructuralError);
  EXPECT_THROW(parse_moebius("[[1,0],[0,1]] mod 9"), NotAPrime);
  EXPECT_THROW(parse_moebius("[[1,2],[2,4]] mod 7"), StructuralError);
}

TEST(Evaluate, TranslateActionIsAHomomorphismExhaustivelyUpTo31) {
  for (i64 p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    const auto m = check_prime(p);
    std::vector<MoebiusMap> maps;
    for (i64 a = 0; a < p; ++a)
      for (i64 b = 0; b < p; ++b) maps.push_back(embed_translate(tr(m, a, b)));
    std::vector<ProjectiveValue> line{ProjectiveValue::infinity(m)};
    for (i64 x = 0; x < p; ++x) line.push_back(ProjectiveValue::finite(FieldElement(x, m)));
    for (const auto& g : maps) {
      for (const auto& h : maps) {
        const MoebiusMap gh = compose(g, h);
        for (const auto& x : line) ASSERT_EQ(evaluate(gh, x), evaluate(g, evaluate(h, x)));
      }
    }
  }
}

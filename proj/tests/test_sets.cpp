#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <random>

#include "hyperlab/sets.hpp"

using namespace hyperlab;

namespace {

std::vector<u64> values(const ScalarSet& s) {
  std::vector<u64> v;
  for (const auto& x : s) v.push_back(x.value());
  return v;
}

u64 naive_multiplicity(const TranslateSet& h) {
  u64 best = 0;
  for (const auto& x : h) {
    u64 same_a = 0, same_b = 0;
    for (const auto& y : h) {
      same_a += x.a == y.a ? 1 : 0;
      same_b += x.b == y.b ? 1 : 0;
    }
    best = std::max({best, same_a, same_b});
  }
  return best;
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "hyperlab_" + name;
}

}  // namespace

TEST(ParseSetspec, Examples) {
  const auto m = check_prime(7);
  EXPECT_EQ(values(parse_scalar_spec("ap:1,1,3", m)), (std::vector<u64>{1, 2, 3}));
  EXPECT_EQ(values(parse_scalar_spec("invunion:ap:1,1,2", m)), (std::vector<u64>{1, 2, 4}));
  EXPECT_THROW(parse_scalar_spec("ap:1,0,3", m), InvalidSpec);
}

TEST(ParseSetspec, EveryForm) {
  const auto m = check_prime(7);
  EXPECT_EQ(values(parse_scalar_spec("gp:1,3,6", m)), (std::vector<u64>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(values(parse_scalar_spec("gp:2,2,10", m)), (std::vector<u64>{1, 2, 4}));
  EXPECT_EQ(values(parse_scalar_spec("list:-1,8,1,0", m)), (std::vector<u64>{0, 1, 6}));
  EXPECT_EQ(values(parse_scalar_spec("list:123456789012345678901234567891", m)), (std::vector<u64>{1}));
  EXPECT_EQ(values(parse_scalar_spec("list:-123456789012345678901234567891", m)), (std::vector<u64>{6}));
  EXPECT_EQ(parse_scalar_spec("random:5,9", m).size(), 5U);
  EXPECT_EQ(parse_scalar_spec("random:7", m).size(), 7U);
  EXPECT_EQ(values(parse_scalar_spec("invunion:list:0,3", m)), (std::vector<u64>{0, 3, 5}));
  EXPECT_EQ(values(parse_scalar_spec("ap:0,1,1000000000000", m)).size(), 7U);

  const TranslateSet c = parse_translate_spec("cart:list:0,1;list:2,3,4", m);
  EXPECT_EQ(c.size(), 6U);
  const TranslateSet l = parse_translate_spec("listh:1,2;-1,-2;1,2", m);
  EXPECT_EQ(l, TranslateSet::of(m, {{1, 2}, {6, 5}}));
  EXPECT_EQ(parse_translate_spec("randomh:49,3", m).size(), 49U);

  EXPECT_TRUE(std::holds_alternative<TranslateSet>(parse_setspec("listh:1,1", m)));
  EXPECT_TRUE(std::holds_alternative<ScalarSet>(parse_setspec("list:1", m)));
}

TEST(ParseSetspec, ErrorsCarryPositions) {
  const auto m = check_prime(7);
  auto position = [&](const std::string& spec) -> std::size_t {
    try {
      parse_setspec(spec, m);
    } catch (const InvalidSpec& e) {
      return e.position();
    }
    ADD_FAILURE() << "no error for " << spec;
    return 0;
  };
  EXPECT_EQ(position("ap:1,0,3"), 5U);
  EXPECT_EQ(position("gp:1,7,3"), 5U);
  EXPECT_EQ(position("ap:1,1,0"), 7U);
  EXPECT_EQ(position("random:0"), 7U);
  EXPECT_EQ(position("random:8"), 0U);
  EXPECT_EQ(position("randomh:50"), 0U);
  EXPECT_EQ(position("list:1,,2"), 7U);
  EXPECT_EQ(position("list:1 "), 6U);
  EXPECT_EQ(position("bogus:1"), 0U);
  EXPECT_EQ(position("listh:1;2"), 7U);
  EXPECT_EQ(position("cart:list:1,list:2"), 12U);
  EXPECT_THROW(parse_translate_spec("list:1", m), InvalidSpec);
  EXPECT_THROW(parse_scalar_spec("listh:1,1", m), InvalidSpec);
}

TEST(ParseSetspec, RandomSpecsAreSeedDeterministic) {
  const auto m = check_prime(1009);
  EXPECT_EQ(parse_scalar_spec("random:50,42", m), parse_scalar_spec("random:50,42", m));
  EXPECT_NE(parse_scalar_spec("random:50,42", m), parse_scalar_spec("random:50,43", m));
  EXPECT_EQ(parse_translate_spec("randomh:20,42", m), parse_translate_spec("randomh:20,42", m));
  const auto big = check_prime((i64{1} << 61) - 1);
  EXPECT_EQ(parse_scalar_spec("random:100,1", big), parse_scalar_spec("random:100,1", big));
  EXPECT_EQ(parse_translate_spec("randomh:100,1", big).size(), 100U);
}

TEST(ParseSetspec, RenderRoundTrips) {
  const auto m = check_prime(101);
  for (const std::string spec : {"ap:3,7,20", "gp:2,3,30", "random:40,5", "invunion:ap:1,1,10"}) {
    const ScalarSet s = parse_scalar_spec(spec, m);
    EXPECT_EQ(parse_scalar_spec(render(s), m), s) << spec;
  }
  for (const std::string spec : {"cart:ap:1,1,4;gp:1,2,5", "randomh:30,2", "listh:1,2;3,4"}) {
    const TranslateSet h = parse_translate_spec(spec, m);
    EXPECT_EQ(parse_translate_spec(render(h), m), h) << spec;
  }
}

TEST(SetTypes, CanonicalAndModulusChecked) {
  const auto m = check_prime(7);
  const ScalarSet s = ScalarSet::of(m, {5, 3, 5, 10, -4});
  EXPECT_EQ(values(s), (std::vector<u64>{3, 5}));
  EXPECT_TRUE(s.contains(FieldElement(10, m)));
  EXPECT_FALSE(s.contains(FieldElement(3, check_prime(11))));
  EXPECT_THROW(ScalarSet(m, {FieldElement(1, check_prime(11))}), StructuralError);
}

TEST(FileIngestion, ReadsOneLiteralPerLine) {
  const auto m = check_prime(7);
  const std::string scalars = temp_path("scalars.txt");
  {
    std::ofstream f(scalars);
    f << "# comment\n1\n\n  -1  \n8\r\n";
  }
  EXPECT_EQ(values(read_scalar_file(scalars, m)), (std::vector<u64>{1, 6}));
  const std::string pairs = temp_path("pairs.txt");
  {
    std::ofstream f(pairs);
    f << "1,2\n# x\n3,4\n";
  }
  EXPECT_EQ(read_translate_file(pairs, m), TranslateSet::of(m, {{1, 2}, {3, 4}}));

  const std::string bad = temp_path("bad.txt");
  {
    std::ofstream f(bad);
    f << "1\n2,3\n";
  }
  try {
    read_scalar_file(bad, m);
    ADD_FAILURE() << "expected InvalidSpec";
  } catch (const InvalidSpec& e) {
    EXPECT_EQ(e.position(), 3U);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(read_scalar_file(temp_path("missing.txt"), m), IoError);
  std::remove(scalars.c_str());
  std::remove(pairs.c_str());
  std::remove(bad.c_str());
}

TEST(GenCartesian, Examples) {
  const auto m = check_prime(7);
  EXPECT_EQ(gen_cartesian(ScalarSet::of(m, {0}), ScalarSet::of(m, {0})), TranslateSet::of(m, {{0, 0}}));
  EXPECT_EQ(gen_cartesian(ScalarSet::of(m, {1, 2}), ScalarSet::of(m, {0, 3, 4})).size(), 6U);
  const auto m101 = check_prime(101);
  const ScalarSet b = parse_scalar_spec("ap:1,1,4", m101);
  const TranslateSet h = gen_cartesian(b, b);
  EXPECT_EQ(h.size(), 16U);
  EXPECT_EQ(max_line_multiplicity(h), 4U);
}

TEST(GenCartesian, CardinalityIsProduct) {
  const auto m = check_prime(61);
  for (u64 seed = 0; seed < 50; ++seed) {
    const ScalarSet b = random_scalar_set(m, 1 + seed % 9, seed), c = random_scalar_set(m, 1 + seed % 7, seed + 99);
    EXPECT_EQ(gen_cartesian(b, c).size(), b.size() * c.size());
  }
}

TEST(MaxLineMultiplicity, Examples) {
  const auto m = check_prime(101);
  EXPECT_EQ(max_line_multiplicity(TranslateSet::of(m, {{1, 2}, {3, 4}, {5, 6}})), 1U);
  const ScalarSet b = parse_scalar_spec("random:7,3", m);
  EXPECT_EQ(max_line_multiplicity(gen_cartesian(b, b)), 7U);
  EXPECT_THROW(max_line_multiplicity(TranslateSet(m)), EmptyInput);
  for (u64 seed = 0; seed < 100; ++seed) {
    const TranslateSet h = random_translate_set(check_prime(11), 1 + seed % 40, seed);
    EXPECT_EQ(max_line_multiplicity(h), naive_multiplicity(h));
  }
}

TEST(PruneRichLines, Examples) {
  const auto m = check_prime(101);
  const TranslateSet h = random_translate_set(m, 60, 1);
  const auto none = prune_rich_lines(h, max_line_multiplicity(h) + 1);
  EXPECT_TRUE(none.removed.empty());
  EXPECT_EQ(none.kept, h);
  const ScalarSet b = parse_scalar_spec("ap:1,1,5", m);
  EXPECT_TRUE(prune_rich_lines(gen_cartesian(b, b), 5).kept.empty());
  EXPECT_THROW(prune_rich_lines(h, 0), InvalidArgument);
}

TEST(PruneRichLines, PartitionAndPostcondition) {
  for (u64 seed = 0; seed < 100; ++seed) {
    const auto m = check_prime(seed % 2 == 0 ? 11 : 13);
    const TranslateSet h = random_translate_set(m, 5 + seed % 60, seed);
    const u64 threshold = 1 + seed % 5;
    const auto r = prune_rich_lines(h, threshold);
    EXPECT_EQ(r.kept.size() + r.removed.size(), h.size());
    for (const auto& t : r.kept) EXPECT_FALSE(r.removed.contains(t));
    for (const auto& t : h) EXPECT_TRUE(r.kept.contains(t) || r.removed.contains(t));
    if (!r.kept.empty()) {
      EXPECT_LT(max_line_multiplicity(r.kept), threshold);
      if (threshold == 2) {
        EXPECT_EQ(max_line_multiplicity(r.kept), 1U);
      }
    }
  }
}

TEST(RotateCoordinates, Examples) {
  const auto m = check_prime(7);
  EXPECT_EQ(rotate_coordinates(TranslateSet::of(m, {{1, 1}})), TranslateSet::of(m, {{1, 0}}));
  EXPECT_EQ(rotate_coordinates(TranslateSet::of(m, {{0, 0}})), TranslateSet::of(m, {{0, 0}}));
  const TranslateSet h = random_translate_set(check_prime(101), 300, 4);
  EXPECT_EQ(rotate_coordinates(h).size(), h.size());
}

TEST(RotateCoordinates, InverseExhaustivelyUpTo31) {
  for (i64 p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    const auto m = check_prime(p);
    const TranslateSet all = random_translate_set(m, static_cast<u64>(p * p), 0);
    EXPECT_EQ(unrotate_coordinates(rotate_coordinates(all)), all);
    EXPECT_EQ(rotate_coordinates(unrotate_coordinates(all)), all);
    for (const auto& t : all) {
      const TranslateSet one(m, {t});
      EXPECT_EQ(unrotate_coordinates(rotate_coordinates(one)), one);
    }
  }
}

TEST(RandomGeneration, UniformWithoutReplacementAndRangeChecked) {
  const auto m = check_prime(7);
  EXPECT_THROW(random_scalar_set(m, 8, 0), InvalidArgument);
  EXPECT_THROW(random_translate_set(m, 50, 0), InvalidArgument);
  EXPECT_EQ(random_scalar_set(m, 7, 0).size(), 7U);
  // Each residue appears in roughly count/p of the draws.
  std::map<u64, u64> hits;
  for (u64 seed = 0; seed < 7000; ++seed) {
    for (const auto& x : random_scalar_set(m, 1, seed)) ++hits[x.value()];
  }
  for (const auto& [v, n] : hits) {
    EXPECT_GT(n, 850U) << v;
    EXPECT_LT(n, 1150U) << v;
  }
}

TEST(SetAlgebra, SumsDifferencesInverses) {
  const auto m = check_prime(7);
  const ScalarSet a = ScalarSet::of(m, {0, 1});
  EXPECT_EQ(values(sumset(a, a)), (std::vector<u64>{0, 1, 2}));
  EXPECT_EQ(values(difference_set(a, a)), (std::vector<u64>{0, 1, 6}));
  EXPECT_EQ(values(inverse_union(ScalarSet::of(m, {2, 3}))), (std::vector<u64>{2, 3, 4, 5}));
}

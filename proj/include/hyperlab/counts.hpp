#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hyperlab/field.hpp"
#include "hyperlab/histogram.hpp"
#include "hyperlab/moebius.hpp"
#include "hyperlab/sets.hpp"

namespace hyperlab {

// Conventions shared by every kernel in this header:
//  * lambda is the curve constant: translate (a, b) is the hyperbola
//    (x - b)(y - a) = lambda, i.e. x ↦ a + (-lambda)/(b - x). The default
//    lambda = -1 gives x ↦ a + 1/(b - x), the matrix-embeddable case.
//  * A pole (x = b) never produces an incidence.
//  * Energy keys are full SL2 matrix entries unless KeyMode::kProjective is asked for.

inline FieldElement default_lambda(PrimeModulus m) noexcept { return FieldElement(-1, m); }

enum class KeyMode { kSl2, kProjective };

struct CountOptions {
  KeyMode mode = KeyMode::kSl2;
  unsigned workers = 1;
  Budget budget{};
};

namespace detail {

// O(1) membership for residues; a bitmap for small p, a hash set otherwise.
class Membership {
 public:
  explicit Membership(const ScalarSet& s) : p_(s.modulus().value()) {
    if (p_ <= kBitmapLimit) {
      bits_.assign(p_, 0);
      for (const auto& x : s) bits_[x.value()] = 1;
    } else {
      set_.reserve(s.size() * 2);
      for (const auto& x : s) set_.insert(x.value());
    }
  }
  bool contains(u64 v) const {
    return p_ <= kBitmapLimit ? bits_[v] != 0 : set_.count(v) != 0;
  }

 private:
  static constexpr u64 kBitmapLimit = u64{1} << 26U;
  u64 p_;
  std::vector<unsigned char> bits_;
  std::unordered_set<u64> set_;
};

inline void require_same(PrimeModulus x, PrimeModulus y) {
  if (!(x == y)) throw StructuralError("operands have different moduli");
}

inline void require_nonzero_lambda(FieldElement lambda) {
  if (lambda.is_zero()) throw InvalidArgument("lambda must be nonzero");
}

inline void require_group_lambda(FieldElement lambda) {
  if (!(lambda == default_lambda(lambda.modulus()))) {
    throw InvalidArgument(
        "group-structured counts need lambda = -1 (translates must embed in SL2)");
  }
}

inline MatrixKey key_of(const MoebiusMap& m, KeyMode mode) {
  return mode == KeyMode::kSl2 ? m.entries() : m.canonical().entries();
}

inline MoebiusMap map_of(const MatrixKey& k, PrimeModulus m) {
  return {FieldElement::from_residue(k[0], m), FieldElement::from_residue(k[1], m),
          FieldElement::from_residue(k[2], m), FieldElement::from_residue(k[3], m)};
}

// Number of r with r(r-1)/2 = pairs.
inline u64 points_from_pair_count(u64 pairs) {
  u64 r = static_cast<u64>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(pairs))) / 2.0);
  while (r * (r - 1) / 2 > pairs) --r;
  while ((r + 1) * r / 2 <= pairs) ++r;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Incidences
// ---------------------------------------------------------------------------

/// #{(h, x) ∈ H × B : h(x) ∈ C}.
inline u64 sigma_rect(const ScalarSet& domain, const ScalarSet& range, const TranslateSet& h,
                      FieldElement lambda, unsigned workers = 1) {
  const PrimeModulus m = h.modulus();
  detail::require_same(m, domain.modulus());
  detail::require_same(m, range.modulus());
  detail::require_same(m, lambda.modulus());
  detail::require_nonzero_lambda(lambda);
  const u64 numerator = m.neg(lambda.value());
  const detail::Membership in_range(range);
  const auto& xs = domain.elements();
  const auto& hs = h.elements();
  return sharded_sum(hs.size(), workers, [&](std::size_t i) -> u64 {
    const u64 a = hs[i].a.value();
    const u64 b = hs[i].b.value();
    u64 count = 0;
    for (const auto& x : xs) {
      const u64 gap = m.sub(b, x.value());
      if (gap == 0) continue;
      if (in_range.contains(m.add(a, m.mul(numerator, m.inv(gap))))) ++count;
    }
    return count;
  });
}

/// σ(A, H): incidences between A×A and the translates in H.
inline u64 sigma(const ScalarSet& a, const TranslateSet& h, FieldElement lambda,
                 unsigned workers = 1) {
  return sigma_rect(a, a, h, lambda, workers);
}

inline u64 sigma(const ScalarSet& a, const TranslateSet& h) {
  return sigma(a, h, default_lambda(h.modulus()));
}

using Point = std::pair<FieldElement, FieldElement>;

/// Incidences between an arbitrary point set and H: #{(h, q) : (qx - b)(qy - a) = lambda}.
inline u64 point_incidences(const std::vector<Point>& points, const TranslateSet& h,
                            FieldElement lambda) {
  detail::require_nonzero_lambda(lambda);
  u64 count = 0;
  for (const auto& t : h) {
    for (const auto& [x, y] : points) {
      if ((x - t.b) * (y - t.a) == lambda) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Energies of the translate set in the Moebius group
// ---------------------------------------------------------------------------

/// r_{HH⁻¹}(u) over all |H|² ordered pairs.
inline MatrixHistogram quotient_histogram(const TranslateSet& h, const CountOptions& opt = {}) {
  const auto& hs = h.elements();
  opt.budget.check_table(static_cast<u128>(hs.size()) * hs.size(), "quotient histogram");
  return sharded_histogram<MatrixHistogram>(hs.size(), opt.workers,
                                            [&](std::size_t i, MatrixHistogram& out) {
                                              for (const auto& h2 : hs) {
                                                out.add(detail::key_of(pair_quotient(hs[i], h2),
                                                                       opt.mode));
                                              }
                                            });
}

/// r_{HH⁻¹H}(x) over all |H|³ ordered triples.
inline MatrixHistogram triple_histogram(const TranslateSet& h, const CountOptions& opt = {}) {
  const auto& hs = h.elements();
  const u64 n = hs.size();
  if (n > opt.budget.max_h_t3) throw ResourceLimit("T3 enumeration |H|", n, opt.budget.max_h_t3);
  opt.budget.check_table(static_cast<u128>(n) * n * n, "T3");
  return sharded_histogram<MatrixHistogram>(hs.size(), opt.workers,
                                            [&](std::size_t i, MatrixHistogram& out) {
                                              for (const auto& h2 : hs) {
                                                for (const auto& h3 : hs) {
                                                  out.add(detail::key_of(
                                                      triple_product(hs[i], h2, h3), opt.mode));
                                                }
                                              }
                                            });
}

/// T_k(H) for k ∈ {2, 3, 4}: the number of 2k-tuples with equal alternating
/// products h1 h2⁻¹ h3 ... . T_2 is the energy E(H).
///
/// T_4 convolves the quotient histogram with itself, so its cost is the
/// squared support of r_{HH⁻¹}.
inline u64 t_k(const TranslateSet& h, int k, const CountOptions& opt = {}) {
  switch (k) {
    case 2:
      return quotient_histogram(h, opt).sum_of_squares();
    case 3:
      return triple_histogram(h, opt).sum_of_squares();
    case 4: {
      const MatrixHistogram q = quotient_histogram(h, opt);
      const u64 support = q.support_size();
      if (support > opt.budget.max_t4_support) {
        throw ResourceLimit("T4 quotient support", support, opt.budget.max_t4_support);
      }
      opt.budget.check_table(static_cast<u128>(support) * support, "T4");
      std::vector<std::pair<MoebiusMap, u64>> terms;
      terms.reserve(support);
      for (const auto& [key, r] : q.sorted_entries()) {
        terms.emplace_back(detail::map_of(key, h.modulus()), r);
      }
      const MatrixHistogram conv = sharded_histogram<MatrixHistogram>(
          terms.size(), opt.workers, [&](std::size_t i, MatrixHistogram& out) {
            for (const auto& [v, rv] : terms) {
              out.add(detail::key_of(compose(terms[i].first, v), opt.mode), terms[i].second * rv);
            }
          });
      return conv.sum_of_squares();
    }
    default:
      throw InvalidArgument("t_k supports k in {2, 3, 4}");
  }
}

/// The two solution counts of the coordinate systems
///   N1: a1 = a1', b1 - b2 = b1' - b2', a2 = a2'
///   N2: b1 = b1', a1 - a2 = a1' - a2', b2 = b2'
/// reported next to the energy they are meant to describe.
struct EnergySystems {
  u64 energy;
  u64 n1;
  u64 n2;
};

inline EnergySystems lemma_t2_systems(const TranslateSet& h, const CountOptions& opt = {}) {
  MatrixHistogram first, second;
  const PrimeModulus m = h.modulus();
  for (const auto& x : h) {
    for (const auto& y : h) {
      first.add({x.a.value(), y.a.value(), m.sub(x.b.value(), y.b.value()), 0});
      second.add({x.b.value(), y.b.value(), m.sub(x.a.value(), y.a.value()), 0});
    }
  }
  return {t_k(h, 2, opt), first.sum_of_squares(), second.sum_of_squares()};
}

// ---------------------------------------------------------------------------
// Rectangular quadruples and the Minkowski distance
// ---------------------------------------------------------------------------

/// D(h, h') = (a - a')(b - b') over ordered pairs; the diagonal lands on 0.
inline ScalarHistogram d_histogram(const TranslateSet& h) {
  const PrimeModulus m = h.modulus();
  ScalarHistogram out(h.size() * 2);
  for (const auto& x : h) {
    for (const auto& y : h) {
      out.add(m.mul(m.sub(x.a.value(), y.a.value()), m.sub(x.b.value(), y.b.value())));
    }
  }
  return out;
}

/// Q(H): ordered quadruples with D(h1, h1') = D(h2, h2').
inline u64 q_rect(const TranslateSet& h) { return d_histogram(h).sum_of_squares(); }

/// r_{B-C}(d) over ordered pairs.
inline ScalarHistogram difference_histogram(const ScalarSet& b, const ScalarSet& c) {
  detail::require_same(b.modulus(), c.modulus());
  const PrimeModulus m = b.modulus();
  ScalarHistogram out(b.size() * c.size());
  for (const auto& x : b) {
    for (const auto& y : c) out.add(m.sub(x.value(), y.value()));
  }
  return out;
}

inline ScalarHistogram difference_histogram(const ScalarSet& b) { return difference_histogram(b, b); }

/// #{(q, q') ∈ (A×A)² : (x - x')² - (y - y')² = lambda}, via the difference
/// histogram of A.
inline u64 minkowski_realisations(const ScalarSet& a, FieldElement lambda) {
  detail::require_same(a.modulus(), lambda.modulus());
  detail::require_nonzero_lambda(lambda);
  const PrimeModulus m = a.modulus();
  const ScalarHistogram diff = difference_histogram(a);
  ScalarHistogram squares;
  for (const auto& [d, r] : diff) squares.add(m.mul(d, d), r);
  u128 total = 0;
  for (const auto& [dx, r] : diff) {
    total += static_cast<u128>(r) * squares.at(m.sub(m.mul(dx, dx), lambda.value()));
  }
  return detail::checked_u64(total, "minkowski count");
}

/// The 45° change of variables applied to the Minkowski count. With
/// u = x + y, v = x - y one has (x-x')² - (y-y')² = (u - u')(v - v'), so each
/// point q' of A×A becomes the translate (a, b) = (x' - y', x' + y') and each
/// point q becomes (u, v), which lies in (A+A)×(A-A).
struct MinkowskiReformulation {
  ScalarSet domain;                // A + A
  ScalarSet range;                 // A - A
  TranslateSet translates;         // {(x' - y', x' + y')}
  std::vector<Point> rotated_points;  // {(x + y, x - y)}, a subset of domain × range
};

inline MinkowskiReformulation minkowski_reformulation(const ScalarSet& a) {
  std::vector<Translate> hs;
  std::vector<Point> pts;
  hs.reserve(a.size() * a.size());
  pts.reserve(a.size() * a.size());
  for (const auto& x : a) {
    for (const auto& y : a) {
      hs.push_back({x - y, x + y});
      pts.emplace_back(x + y, x - y);
    }
  }
  return {sumset(a, a), difference_set(a, a), TranslateSet(a.modulus(), std::move(hs)),
          std::move(pts)};
}

// ---------------------------------------------------------------------------
// Rich curves
// ---------------------------------------------------------------------------

template <class Witness>
struct RichCount {
  u64 k = 0;
  u64 count = 0;
  std::vector<Witness> witnesses;
};

enum class RichMode { kPairs, kExhaustive };

/// (translate, richness) for every translate meeting A×A in at least min_richness points,
/// sorted by translate.
using RichnessProfile = std::vector<std::pair<Translate, u64>>;

namespace detail {

// Every translate through two points of A×A is found from that pair: the two
// points have distinct coordinates and fix b as a root of
// (b - x1)(b - x2) = λ'(x1 - x2)/(y1 - y2). A translate with r points is hit
// by r(r-1)/2 pairs, which recovers r.
inline RichnessProfile richness_by_pairs(const ScalarSet& a, FieldElement lambda,
                                         unsigned workers, const Budget& budget) {
  const PrimeModulus m = a.modulus();
  const u64 numerator = m.neg(lambda.value());
  const u64 half = m.inv(2);
  std::vector<std::pair<u64, u64>> pts;
  pts.reserve(a.size() * a.size());
  for (const auto& x : a) {
    for (const auto& y : a) pts.emplace_back(x.value(), y.value());
  }
  const u128 n = pts.size();
  budget.check_table(n * n, "pair-mode candidate");

  using Keys = std::vector<std::pair<u64, u64>>;
  struct Shard {
    Keys keys;
    void merge(const Shard& o) { keys.insert(keys.end(), o.keys.begin(), o.keys.end()); }
  };
  Shard all = sharded_histogram<Shard>(pts.size(), workers, [&](std::size_t i, Shard& out) {
    const auto [x1, y1] = pts[i];
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto [x2, y2] = pts[j];
      if (x1 == x2 || y1 == y2) continue;
      const u64 dx = m.sub(x1, x2);
      const u64 kappa = m.mul(m.mul(numerator, dx), m.inv(m.sub(y1, y2)));
      const u64 disc = m.add(m.mul(dx, dx), m.mul(4 % m.value(), kappa));
      const auto root = m.sqrt(disc);
      if (!root) continue;
      const u64 sum = m.add(x1, x2);
      for (const u64 s : {*root, m.neg(*root)}) {
        const u64 b = m.mul(m.add(sum, s), half);
        const u64 av = m.sub(y1, m.mul(numerator, m.inv(m.sub(b, x1))));
        out.keys.emplace_back(av, b);
        if (*root == 0) break;
      }
    }
  });
  std::sort(all.keys.begin(), all.keys.end());
  RichnessProfile out;
  for (std::size_t i = 0; i < all.keys.size();) {
    std::size_t j = i;
    while (j < all.keys.size() && all.keys[j] == all.keys[i]) ++j;
    out.push_back({{FieldElement::from_residue(all.keys[i].first, m),
                    FieldElement::from_residue(all.keys[i].second, m)},
                   points_from_pair_count(j - i)});
    i = j;
  }
  return out;
}

inline RichnessProfile richness_exhaustive(const ScalarSet& a, FieldElement lambda,
                                           u64 min_richness, const Budget& budget) {
  const PrimeModulus m = a.modulus();
  const u64 p = m.value();
  if (p > budget.max_exhaustive_p) throw ResourceLimit("exhaustive translate scan p", p, budget.max_exhaustive_p);
  const u64 numerator = m.neg(lambda.value());
  const Membership in_a(a);
  RichnessProfile out;
  std::vector<u64> offsets;  // numerator/(b - x) for x ∈ A, x ≠ b
  for (u64 b = 0; b < p; ++b) {
    offsets.clear();
    for (const auto& x : a) {
      if (x.value() != b) offsets.push_back(m.mul(numerator, m.inv(m.sub(b, x.value()))));
    }
    for (u64 av = 0; av < p; ++av) {
      u64 r = 0;
      for (u64 off : offsets) r += in_a.contains(m.add(av, off)) ? 1 : 0;
      if (r >= min_richness && r > 0) {
        out.push_back({{FieldElement::from_residue(av, m), FieldElement::from_residue(b, m)}, r});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Richness of every translate with at least two points of A×A (pairs mode),
/// or at least one (exhaustive mode).
inline RichnessProfile richness_profile(const ScalarSet& a, FieldElement lambda, RichMode mode,
                                        unsigned workers = 1, const Budget& budget = {}) {
  detail::require_same(a.modulus(), lambda.modulus());
  detail::require_nonzero_lambda(lambda);
  return mode == RichMode::kPairs ? detail::richness_by_pairs(a, lambda, workers, budget)
                                  : detail::richness_exhaustive(a, lambda, 1, budget);
}

/// m_k: translates (a, b) ∈ F_p² meeting A×A in at least k points, optionally
/// restricted to the translates of `within`.
inline RichCount<Translate> rich_hyperbolae(const ScalarSet& a, u64 k, FieldElement lambda,
                                            RichMode mode, const TranslateSet* within = nullptr,
                                            bool keep_witnesses = false, unsigned workers = 1,
                                            const Budget& budget = {}) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (mode == RichMode::kPairs && k < 2) {
    throw InvalidArgument("pairs mode cannot detect 1-rich translates; use k >= 2");
  }
  RichCount<Translate> out{k, 0, {}};
  if (k > a.size()) return out;
  for (const auto& [t, r] : richness_profile(a, lambda, mode, workers, budget)) {
    if (r < k || (within != nullptr && !within->contains(t))) continue;
    ++out.count;
    if (keep_witnesses) out.witnesses.push_back(t);
  }
  return out;
}

/// Affine line in F_p²: y = slope·x + intercept, or x = intercept when vertical.
struct Line {
  bool vertical = false;
  u64 slope = 0;
  u64 intercept = 0;

  friend auto operator<=>(const Line&, const Line&) = default;
};

/// l_k: lines containing at least k points of B×C, found by bucketing point
/// pairs by the line through them. Axis-parallel lines (vertical and
/// horizontal) are included unless include_axis_parallel is false.
inline RichCount<Line> rich_lines(const ScalarSet& b, const ScalarSet& c, u64 k,
                                  bool include_axis_parallel = true,
                                  bool keep_witnesses = false) {
  detail::require_same(b.modulus(), c.modulus());
  if (k < 2) throw InvalidArgument("rich_lines needs k >= 2");
  const PrimeModulus m = b.modulus();
  std::vector<std::pair<u64, u64>> pts;
  for (const auto& x : b) {
    for (const auto& y : c) pts.emplace_back(x.value(), y.value());
  }
  std::vector<Line> keys;
  keys.reserve(pts.size() * (pts.size() - (pts.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto [x1, y1] = pts[i];
      const auto [x2, y2] = pts[j];
      if (x1 == x2) {
        if (include_axis_parallel) keys.push_back({true, 0, x1});
        continue;
      }
      const u64 slope = m.mul(m.sub(y2, y1), m.inv(m.sub(x2, x1)));
      if (slope == 0 && !include_axis_parallel) continue;
      keys.push_back({false, slope, m.sub(y1, m.mul(slope, x1))});
    }
  }
  std::sort(keys.begin(), keys.end());
  RichCount<Line> out{k, 0, {}};
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    if (detail::points_from_pair_count(j - i) >= k) {
      ++out.count;
      if (keep_witnesses) out.witnesses.push_back(keys[i]);
    }
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sum-product quantities
// ---------------------------------------------------------------------------

/// E₊(B) = Σ r²_{B-B}(x).
inline u64 additive_energy(const ScalarSet& b) { return difference_histogram(b).sum_of_squares(); }

/// r_{(B-B)(B-B)}: products d1·d2 weighted by r_{B-B}(d1)·r_{B-B}(d2). Mass |B|⁴.
inline ScalarHistogram product_rep_histogram(const ScalarSet& b) {
  const PrimeModulus m = b.modulus();
  const auto diffs = difference_histogram(b).sorted_entries();
  ScalarHistogram out(diffs.size() * diffs.size());
  for (const auto& [d1, r1] : diffs) {
    for (const auto& [d2, r2] : diffs) out.add(m.mul(d1, d2), r1 * r2);
  }
  return out;
}

inline u64 product_rep_energy(const ScalarSet& b) {
  return product_rep_histogram(b).sum_of_squares();
}

/// Solutions in A⁴ of
///   1: (a1 + a2)(a3 + a4) = 1
///   2: (a1 + a2 - a4)(a3 + a2 + a4) = 1
///   3: (a1 + a2)(a3 + a2·a4) = 1
///   4: (a1 + a2 + a4)(a3 + a2·a4) = 1
inline u64 sumprod_quadruples(const ScalarSet& a, int variant) {
  const PrimeModulus m = a.modulus();
  if (variant < 1 || variant > 4) throw InvalidArgument("sumprod variant must be 1..4");
  if (variant == 1) {
    ScalarHistogram sums;
    for (const auto& x : a) {
      for (const auto& y : a) sums.add(m.add(x.value(), y.value()));
    }
    u128 total = 0;
    for (const auto& [s, r] : sums) {
      if (s != 0) total += static_cast<u128>(r) * sums.at(m.inv(s));
    }
    return detail::checked_u64(total, "sumprod count");
  }
  // For fixed (a2, a4) the equation reads (a1 + u)(a3 + v) = 1.
  const detail::Membership in_a(a);
  u64 total = 0;
  for (const auto& a2 : a) {
    for (const auto& a4 : a) {
      const u64 x2 = a2.value(), x4 = a4.value();
      u64 u = 0, v = 0;
      switch (variant) {
        case 2:
          u = m.sub(x2, x4);
          v = m.add(x2, x4);
          break;
        case 3:
          u = x2;
          v = m.mul(x2, x4);
          break;
        default:
          u = m.add(x2, x4);
          v = m.mul(x2, x4);
          break;
      }
      for (const auto& a1 : a) {
        const u64 f = m.add(a1.value(), u);
        if (f != 0 && in_a.contains(m.sub(m.inv(f), v))) ++total;
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Borel-coset decompositions
// ---------------------------------------------------------------------------

/// r²_{HH⁻¹} mass split over left cosets gB, labelled by g(∞).
struct BorelCosetReport {
  std::map<u64, u64> non_borel;  // finite label → Σ_{x ∈ gB} r²(x)
  u64 borel_mass = 0;            // the coset B itself (label ∞)
  u64 max_non_borel = 0;         // X_B
  u64 total = 0;                 // = E(H)
};

inline BorelCosetReport borel_coset_mass(const TranslateSet& h, const CountOptions& opt = {}) {
  CountOptions sl2 = opt;
  sl2.mode = KeyMode::kSl2;
  const PrimeModulus m = h.modulus();
  BorelCosetReport out;
  for (const auto& [key, r] : quotient_histogram(h, sl2)) {
    const u64 mass = r * r;
    out.total += mass;
    if (key[2] == 0) {
      out.borel_mass += mass;
    } else {
      out.non_borel[m.mul(key[0], m.inv(key[2]))] += mass;
    }
  }
  for (const auto& [label, mass] : out.non_borel) out.max_non_borel = std::max(out.max_non_borel, mass);
  return out;
}

/// T3 split into the part supported on B (Y_B) and the rest.
struct BorelT3Report {
  u64 borel = 0;
  u64 non_borel = 0;
  u64 t3 = 0;
};

inline BorelT3Report borel_t3_mass(const TranslateSet& h, const CountOptions& opt = {}) {
  CountOptions sl2 = opt;
  sl2.mode = KeyMode::kSl2;
  BorelT3Report out;
  for (const auto& [key, r] : triple_histogram(h, sl2)) {
    (key[2] == 0 ? out.borel : out.non_borel) += r * r;
  }
  out.t3 = out.borel + out.non_borel;
  return out;
}

// ---------------------------------------------------------------------------
// Cauchy-Schwarz chain
// ---------------------------------------------------------------------------

/// The first Cauchy-Schwarz step on σ(A, H) and the pigeonhole split by Δ.
///   lhs_sq = σ², rhs_cs = |A| Σ_u r_{HH⁻¹}(u) σ_u with σ_u = #{a ∈ A : u(a) ∈ A},
///   Δ = σ²/(3|A||H|²), Ω = {u : σ_u >= Δ}.
struct CsChainReport {
  u64 sigma = 0;
  u64 lhs_sq = 0;
  u64 rhs_cs = 0;
  Rational delta{0, 1};
  u64 omega_size = 0;
  Rational omega_incidence_share{0, 1};  // Σ_{u∈Ω} r(u)σ_u / Σ_u r(u)σ_u
  u64 quotient_support = 0;

  bool cauchy_schwarz_holds() const noexcept { return lhs_sq <= rhs_cs; }
};

inline CsChainReport cs_chain_report(const ScalarSet& a, const TranslateSet& h,
                                     FieldElement lambda, const CountOptions& opt = {}) {
  detail::require_same(a.modulus(), h.modulus());
  detail::require_group_lambda(lambda);
  const PrimeModulus m = a.modulus();
  CsChainReport out;
  out.sigma = sigma(a, h, lambda, opt.workers);
  out.lhs_sq = detail::checked_u64(static_cast<u128>(out.sigma) * out.sigma, "sigma^2");

  CountOptions sl2 = opt;
  sl2.mode = KeyMode::kSl2;
  const auto quotients = quotient_histogram(h, sl2).sorted_entries();
  out.quotient_support = quotients.size();

  const detail::Membership in_a(a);
  std::vector<u64> sigma_u(quotients.size(), 0);
  u128 weighted = 0;
  for (std::size_t i = 0; i < quotients.size(); ++i) {
    const auto& [key, r] = quotients[i];
    for (const auto& x : a) {
      const u64 den = m.add(m.mul(key[2], x.value()), key[3]);
      if (den == 0) continue;
      const u64 y = m.mul(m.add(m.mul(key[0], x.value()), key[1]), m.inv(den));
      if (in_a.contains(y)) ++sigma_u[i];
    }
    weighted += static_cast<u128>(r) * sigma_u[i];
  }
  out.rhs_cs = detail::checked_u64(weighted * a.size(), "Cauchy-Schwarz right-hand side");

  const u128 delta_den = static_cast<u128>(3) * a.size() * h.size() * h.size();
  if (delta_den == 0) return out;
  out.delta = Rational(static_cast<u128>(out.lhs_sq), delta_den);

  u128 in_omega = 0;
  for (std::size_t i = 0; i < quotients.size(); ++i) {
    if (out.delta.le_integer(sigma_u[i])) {
      ++out.omega_size;
      in_omega += static_cast<u128>(quotients[i].second) * sigma_u[i];
    }
  }
  if (weighted != 0) out.omega_incidence_share = Rational(in_omega, weighted);
  return out;
}

}  // namespace hyperlab

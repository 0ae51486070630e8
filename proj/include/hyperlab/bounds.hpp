#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <optional>
#include <string>

#include "hyperlab/error.hpp"
#include "hyperlab/field.hpp"

namespace hyperlab {

// Right-hand sides of the incidence, energy and rich-curve estimates.
//
// Asymptotic bounds are evaluated with implicit constant 1 and are only ever
// reported as ratios. Case splits compare exact integer powers, so regime
// boundaries are decided without rounding.

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt ipow(u64 base, unsigned exp) {
  BigInt r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

inline double dpow(double x, double e) { return std::pow(x, e); }

}  // namespace detail

/// A bound value plus which case of its definition fired.
struct Evaluation {
  double value = 0.0;
  std::string regime;
  bool applicable = true;  // the statement's own hypotheses hold for these inputs
};

enum class MainBound { kSigma1, kSigma2, kSigma2Cartesian };

/// σ(A, H) bounds parametrised by |A|, |H| and the line multiplicity M.
///   sigma1: |A|^{1/2}|H| + |A|^{6/5}|H|^{4/5} M1^{1/10},
///           M1 = M if |H| <= |A|^{3/2}, else |H|^{2/11}|A|^{8/11}
///   sigma2: |A|^{3/4}|H| + |A|^{11/10}|H|^{17/20} (M2^{1/10} + |H|^{1/15}),
///           M2 = M if |H| <= |A|^{4/3}, else |H|^{3/22}|A|^{9/11}
///   sigma2_cartesian: the bracket replaced by |H|^{1/16}
/// Applicable when |H| > |A|.
inline Evaluation eval_main_theorem(u64 card_a, u64 card_h, u64 m, MainBound which) {
  if (card_a < 1 || card_h < 1 || m < 1) {
    throw InvalidArgument("main theorem bound needs |A|, |H|, M >= 1");
  }
  const double a = static_cast<double>(card_a);
  const double h = static_cast<double>(card_h);
  Evaluation out;
  out.applicable = card_h > card_a;
  switch (which) {
    case MainBound::kSigma1: {
      double m1 = static_cast<double>(m);
      if (detail::ipow(card_h, 2) <= detail::ipow(card_a, 3)) {
        out.regime = "M1=M";
      } else {
        m1 = detail::dpow(h, 2.0 / 11) * detail::dpow(a, 8.0 / 11);
        out.regime = "M1=H^(2/11)A^(8/11)";
      }
      out.value = std::sqrt(a) * h +
                  detail::dpow(a, 6.0 / 5) * detail::dpow(h, 4.0 / 5) * detail::dpow(m1, 0.1);
      break;
    }
    case MainBound::kSigma2: {
      double m2 = static_cast<double>(m);
      if (detail::ipow(card_h, 3) <= detail::ipow(card_a, 4)) {
        out.regime = "M2=M";
      } else {
        m2 = detail::dpow(h, 3.0 / 22) * detail::dpow(a, 9.0 / 11);
        out.regime = "M2=H^(3/22)A^(9/11)";
      }
      out.value = detail::dpow(a, 0.75) * h + detail::dpow(a, 1.1) * detail::dpow(h, 0.85) *
                                                  (detail::dpow(m2, 0.1) + detail::dpow(h, 1.0 / 15));
      break;
    }
    case MainBound::kSigma2Cartesian:
      out.regime = "cartesian";
      out.value = detail::dpow(a, 0.75) * h +
                  detail::dpow(a, 1.1) * detail::dpow(h, 0.85) * detail::dpow(h, 1.0 / 16);
      break;
  }
  return out;
}

enum class FpExtra { kSigma1Ext, kSigma2Ext };

struct FpExtraTerm {
  bool valid;    // |A||H|² <= p³ (sigma1) or |A||H|⁴ <= p⁵ (sigma2)
  double extra;  // |A|^{5/4}|H|/p^{1/4} or |A|^{9/8}|H|/p^{1/8}
};

inline FpExtraTerm eval_fp_extras(u64 card_a, u64 card_h, u64 p, FpExtra which) {
  const double a = static_cast<double>(card_a);
  const double h = static_cast<double>(card_h);
  const double pd = static_cast<double>(p);
  if (which == FpExtra::kSigma1Ext) {
    const bool valid = detail::BigInt(card_a) * detail::ipow(card_h, 2) <= detail::ipow(p, 3);
    return {valid, detail::dpow(a, 1.25) * h / detail::dpow(pd, 0.25)};
  }
  const bool valid = detail::BigInt(card_a) * detail::ipow(card_h, 4) <= detail::ipow(p, 5);
  return {valid, detail::dpow(a, 9.0 / 8) * h / detail::dpow(pd, 1.0 / 8)};
}

/// |H||A|²/p + |A|^{1/2}|H| + min(|A|^{7/5}|H|^{4/5}, p^{1/3}|A|^{4/3}|H|^{2/3}).
/// The first min branch is the smaller one exactly when |A||H|² <= p⁵.
inline Evaluation eval_incidence_hb(u64 card_a, u64 card_h, u64 p) {
  const double a = static_cast<double>(card_a);
  const double h = static_cast<double>(card_h);
  const double pd = static_cast<double>(p);
  Evaluation out;
  out.applicable = card_h > card_a;
  const bool first = detail::BigInt(card_a) * detail::ipow(card_h, 2) <= detail::ipow(p, 5);
  const double tail = first ? detail::dpow(a, 1.4) * detail::dpow(h, 0.8)
                            : detail::dpow(pd, 1.0 / 3) * detail::dpow(a, 4.0 / 3) *
                                  detail::dpow(h, 2.0 / 3);
  out.regime = first ? "min=A^(7/5)H^(4/5)" : "min=p^(1/3)A^(4/3)H^(2/3)";
  out.value = h * a * a / pd + std::sqrt(a) * h + tail;
  return out;
}

/// min(|A|⁷/k⁵, p|A|⁴/k³); the first branch is the smaller one iff |A|³ <= p k².
/// Applicable (the O(|A|⁷/k⁵) claim) when k > √|A|.
inline Evaluation eval_mk_bb(u64 card_a, u64 k, u64 p) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const double a = static_cast<double>(card_a);
  const double kd = static_cast<double>(k);
  Evaluation out;
  out.applicable = static_cast<u128>(k) * k > card_a;
  const bool first = detail::ipow(card_a, 3) <= detail::BigInt(p) * detail::ipow(k, 2);
  out.regime = first ? "A^7/k^5" : "pA^4/k^3";
  out.value = first ? detail::dpow(a, 7) / detail::dpow(kd, 5)
                    : static_cast<double>(p) * detail::dpow(a, 4) / detail::dpow(kd, 3);
  return out;
}

/// Point-line incidences for A×A and |L| lines: |A|^{5/4}|L|^{3/4} + |L| + |A|².
/// Valid when |A||L| < p².
inline Evaluation eval_lines_sdz(u64 card_a, u64 card_l, u64 p) {
  const double a = static_cast<double>(card_a);
  const double l = static_cast<double>(card_l);
  Evaluation out;
  out.applicable = detail::BigInt(card_a) * card_l < detail::ipow(p, 2);
  out.regime = "sdz";
  out.value = detail::dpow(a, 1.25) * detail::dpow(l, 0.75) + l + a * a;
  return out;
}

/// k-rich lines of A×A: min(p|A|²/k², |A|⁵/k⁴). Valid for 2|A|²/p <= k <= |A|, k > 1.
inline Evaluation eval_lines_lk(u64 card_a, u64 k, u64 p) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const double a = static_cast<double>(card_a);
  const double kd = static_cast<double>(k);
  Evaluation out;
  out.applicable = k > 1 && k <= card_a &&
                   detail::BigInt(2) * detail::ipow(card_a, 2) <= detail::BigInt(k) * p;
  const bool first = detail::BigInt(p) * detail::ipow(k, 2) <= detail::ipow(card_a, 3);
  out.regime = first ? "pA^2/k^2" : "A^5/k^4";
  out.value = first ? static_cast<double>(p) * a * a / (kd * kd) : detail::dpow(a, 5) / detail::dpow(kd, 4);
  return out;
}

enum class T3Bound { kLemmaT3Bd, kQStar };

/// lemma_t3bd: |H|³M² + { |H|⁵/p if |H| > p^{5/4}; p^{2/3}|H|^{11/3} if p <= |H| <= p^{5/4};
///                         |H|^{13/3} if |H| < p }
/// qstar:      { |H|⁴/p; p^{2/3}|H|^{8/3}; |H|^{10/3} } over the same cases.
inline Evaluation eval_t3_bounds(u64 card_h, u64 m, u64 p, T3Bound which) {
  const double h = static_cast<double>(card_h);
  const double pd = static_cast<double>(p);
  Evaluation out;
  const bool large = detail::ipow(card_h, 4) > detail::ipow(p, 5);
  const bool small = card_h < p;
  double term = 0.0;
  if (large) {
    out.regime = "H>p^(5/4)";
    term = which == T3Bound::kLemmaT3Bd ? detail::dpow(h, 5) / pd : detail::dpow(h, 4) / pd;
  } else if (!small) {
    out.regime = "p<=H<=p^(5/4)";
    term = detail::dpow(pd, 2.0 / 3) *
           detail::dpow(h, which == T3Bound::kLemmaT3Bd ? 11.0 / 3 : 8.0 / 3);
  } else {
    out.regime = "H<p";
    term = detail::dpow(h, which == T3Bound::kLemmaT3Bd ? 13.0 / 3 : 10.0 / 3);
  }
  out.value = which == T3Bound::kLemmaT3Bd
                  ? detail::dpow(h, 3) * static_cast<double>(m) * static_cast<double>(m) + term
                  : term;
  return out;
}

/// |A|²|H|/p + 2|A|√(p|H|); an upper bound on σ(A, H) with explicit constants.
inline Evaluation eval_charsum(u64 card_a, u64 card_h, u64 p) {
  const double a = static_cast<double>(card_a);
  const double h = static_cast<double>(card_h);
  const double pd = static_cast<double>(p);
  return {a * a * h / pd + 2.0 * a * std::sqrt(pd * h), "charsum", true};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class Exactness { kExactConstant, kAsymptotic };

inline const char* to_string(Exactness e) noexcept {
  return e == Exactness::kExactConstant ? "exact-constant" : "asymptotic";
}

struct BoundInputs {
  u64 p = 0;
  std::optional<u64> card_a;
  std::optional<u64> card_h;
  std::optional<u64> m;
  std::optional<u64> k;
  std::optional<double> K;  // max(|A+A|, |A-A|)/|A|, when relevant

  friend bool operator==(const BoundInputs&, const BoundInputs&) = default;
};

/// An empirical count next to an evaluated right-hand side.
struct BoundReport {
  std::string quantity;
  BoundInputs inputs;
  u64 empirical = 0;
  double bound = 0.0;
  double ratio = 0.0;  // empirical/bound; +inf when bound = 0 < empirical
  std::string regime;
  Exactness exactness = Exactness::kAsymptotic;

  /// Exact-constant reports pass iff empirical <= bound. Asymptotic reports carry no verdict.
  std::optional<bool> verdict() const {
    if (exactness == Exactness::kAsymptotic) return std::nullopt;
    return static_cast<double>(empirical) <= bound;
  }
  bool failed() const { return verdict() == false; }
};

/// Integers below 2^53 convert to double exactly, which keeps the
/// integer <= real comparison in verdict() exact.
inline constexpr u64 kExactDoubleLimit = u64{1} << 53U;

inline BoundReport make_report(std::string quantity, BoundInputs inputs, u64 empirical,
                               const Evaluation& bound, Exactness exactness) {
  if (empirical >= kExactDoubleLimit) {
    throw InvalidArgument("empirical count " + std::to_string(empirical) +
                          " is outside the exactly comparable range (< 2^53)");
  }
  if (!(bound.value >= 0.0)) throw InvalidArgument("bound must be a nonnegative number");
  BoundReport r;
  r.quantity = std::move(quantity);
  r.inputs = inputs;
  r.empirical = empirical;
  r.bound = bound.value;
  if (bound.value > 0.0) {
    r.ratio = static_cast<double>(empirical) / bound.value;
  } else {
    r.ratio = empirical == 0 ? 0.0 : HUGE_VAL;
  }
  r.regime = bound.applicable ? bound.regime : bound.regime + ";outside-hypotheses";
  r.exactness = exactness;
  return r;
}

}  // namespace hyperlab

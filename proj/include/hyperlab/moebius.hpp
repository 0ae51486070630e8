#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <ostream>
#include <string>
#include <string_view>

#include "hyperlab/field.hpp"

namespace hyperlab {

/// A point of the projective line F_p ∪ {∞}.
class ProjectiveValue {
 public:
  static ProjectiveValue finite(FieldElement x) noexcept { return ProjectiveValue(x, false); }
  static ProjectiveValue infinity(PrimeModulus m) noexcept {
    return ProjectiveValue(FieldElement(0, m), true);
  }

  bool is_infinity() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  PrimeModulus modulus() const noexcept { return value_.modulus(); }

  FieldElement value() const {
    if (infinite_) throw StructuralError("value() of the point at infinity");
    return value_;
  }

  friend bool operator==(const ProjectiveValue& x, const ProjectiveValue& y) noexcept {
    if (x.infinite_ || y.infinite_) return x.infinite_ == y.infinite_;
    return x.value_ == y.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ProjectiveValue& x) {
    if (x.infinite_) return os << "inf";
    return os << x.value_;
  }

 private:
  ProjectiveValue(FieldElement v, bool inf) noexcept : value_(v), infinite_(inf) {}
  FieldElement value_;
  bool infinite_;
};

/// The hyperbola translate (x - b)(y - a) = λ, i.e. the map x ↦ a + λ'/(b - x) with λ' = -λ.
struct Translate {
  FieldElement a;  // vertical offset
  FieldElement b;  // horizontal offset

  friend bool operator==(const Translate&, const Translate&) = default;
  friend std::strong_ordering operator<=>(const Translate& x, const Translate& y) noexcept {
    if (auto c = x.a <=> y.a; c != 0) return c;
    return x.b <=> y.b;
  }
  friend std::ostream& operator<<(std::ostream& os, const Translate& h) {
    return os << '(' << h.a << ',' << h.b << ')';
  }
};

/// 2x2 matrix (a b; c d) over F_p with nonzero determinant, acting on the
/// projective line by x ↦ (ax + b)/(cx + d).
///
/// operator== is SL2-entry equality: matrices that differ by a scalar are
/// different keys. Use same_transformation() or canonical() for the
/// projective notion.
class MoebiusMap {
 public:
  MoebiusMap(FieldElement a, FieldElement b, FieldElement c, FieldElement d)
      : a_(a), b_(b), c_(c), d_(d), det_(a * d - b * c) {
    if (!(b.modulus() == a.modulus() && c.modulus() == a.modulus() &&
          d.modulus() == a.modulus())) {
      throw StructuralError("matrix entries have different moduli");
    }
    if (det_.is_zero()) throw StructuralError("singular matrix is not a Moebius map");
  }

  static MoebiusMap identity(PrimeModulus m) {
    return {FieldElement(1, m), FieldElement(0, m), FieldElement(0, m), FieldElement(1, m)};
  }

  FieldElement a() const noexcept { return a_; }
  FieldElement b() const noexcept { return b_; }
  FieldElement c() const noexcept { return c_; }
  FieldElement d() const noexcept { return d_; }
  FieldElement det() const noexcept { return det_; }
  PrimeModulus modulus() const noexcept { return a_.modulus(); }

  std::array<u64, 4> entries() const noexcept {
    return {a_.value(), b_.value(), c_.value(), d_.value()};
  }

  /// Scaled so the first nonzero entry in reading order (a, b, c, d) is 1.
  MoebiusMap canonical() const {
    FieldElement lead = !a_.is_zero() ? a_ : b_;  // a = b = 0 would make det 0
    FieldElement s = lead.inverse();
    return {a_ * s, b_ * s, c_ * s, d_ * s};
  }

  bool same_transformation(const MoebiusMap& other) const {
    return canonical() == other.canonical();
  }

  friend bool operator==(const MoebiusMap& x, const MoebiusMap& y) noexcept {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.d_ == y.d_;
  }

 private:
  FieldElement a_, b_, c_, d_, det_;
};

/// h = (a, b) ↦ ((-a, ab+1), (-1, b)); always in SL2.
inline MoebiusMap embed_translate(const Translate& h) {
  const PrimeModulus m = h.a.modulus();
  return {-h.a, h.a * h.b + FieldElement(1, m), FieldElement(-1, m), h.b};
}

/// Matrix product g·h (apply h first).
inline MoebiusMap compose(const MoebiusMap& g, const MoebiusMap& h) {
  return {g.a() * h.a() + g.b() * h.c(), g.a() * h.b() + g.b() * h.d(),
          g.c() * h.a() + g.d() * h.c(), g.c() * h.b() + g.d() * h.d()};
}

/// Exact matrix inverse adj(m)/det(m); for det = 1 this is ((d, -b), (-c, a)).
inline MoebiusMap invert(const MoebiusMap& m) {
  const FieldElement s = m.det().inverse();
  return {m.d() * s, -m.b() * s, -m.c() * s, m.a() * s};
}

inline MoebiusMap canonicalize(const MoebiusMap& m) { return m.canonical(); }

inline ProjectiveValue evaluate(const MoebiusMap& m, const ProjectiveValue& x) {
  if (x.is_infinity()) {
    if (m.c().is_zero()) return ProjectiveValue::infinity(m.modulus());
    return ProjectiveValue::finite(m.a() / m.c());
  }
  const FieldElement v = x.value();
  const FieldElement den = m.c() * v + m.d();
  if (den.is_zero()) return ProjectiveValue::infinity(m.modulus());
  return ProjectiveValue::finite((m.a() * v + m.b()) / den);
}

/// x ↦ a + numerator/(b - x). numerator = 1 is the matrix-embeddable case.
inline ProjectiveValue evaluate_translate(const Translate& h, const ProjectiveValue& x,
                                          FieldElement numerator) {
  if (numerator.is_zero()) throw InvalidArgument("translate numerator must be nonzero");
  if (x.is_infinity()) return ProjectiveValue::finite(h.a);
  const FieldElement gap = h.b - x.value();
  if (gap.is_zero()) return ProjectiveValue::infinity(h.a.modulus());
  return ProjectiveValue::finite(h.a + numerator / gap);
}

/// h1·h2⁻¹ = ((1 + a1w, a1 - a2 - a1a2w), (w, 1 - a2w)) with w = b1 - b2.
inline MoebiusMap pair_quotient(const Translate& h1, const Translate& h2) {
  const FieldElement one(1, h1.a.modulus());
  const FieldElement w = h1.b - h2.b;
  return {one + h1.a * w, h1.a - h2.a - h1.a * h2.a * w, w, one - h2.a * w};
}

/// h1·h2⁻¹·h3 with w1 = b1 - b2, w2 = a3 - a2.
inline MoebiusMap triple_product(const Translate& h1, const Translate& h2, const Translate& h3) {
  const FieldElement one(1, h1.a.modulus());
  const FieldElement w1 = h1.b - h2.b;
  const FieldElement w2 = h3.a - h2.a;
  const FieldElement k = one + w1 * w2;
  return {-(h1.a * k) - w2, one + h1.a * w1 + h3.b * (w2 + h1.a * k), -k, w1 + h3.b * k};
}

/// Membership in the Borel subgroup (upper triangular, the stabilizer of ∞).
inline bool is_borel(const MoebiusMap& m) noexcept { return m.c().is_zero(); }

/// Label of the left coset m·B: the image m(∞). Borel elements get ∞.
inline ProjectiveValue coset_label(const MoebiusMap& m) {
  return evaluate(m, ProjectiveValue::infinity(m.modulus()));
}

inline std::string render(const MoebiusMap& m) {
  return "[[" + std::to_string(m.a().value()) + "," + std::to_string(m.b().value()) + "],[" +
         std::to_string(m.c().value()) + "," + std::to_string(m.d().value()) + "]] mod " +
         std::to_string(m.modulus().value());
}

inline std::ostream& operator<<(std::ostream& os, const MoebiusMap& m) { return os << render(m); }

/// Parses "[[a,b],[c,d]] mod p". Whitespace between tokens is ignored;
/// entries may be signed and are reduced mod p.
inline MoebiusMap parse_moebius(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const char* what) -> MoebiusMap {
    throw StructuralError(std::string("cannot parse Moebius map at position ") +
                          std::to_string(pos) + ": " + what);
  };
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  auto expect = [&](std::string_view tok) {
    skip_ws();
    if (text.substr(pos, tok.size()) != tok) return false;
    pos += tok.size();
    return true;
  };
  auto integer = [&](i64& out) {
    skip_ws();
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{}) return false;
    pos = static_cast<std::size_t>(ptr - text.data());
    return true;
  };

  std::array<i64, 4> e{};
  if (!expect("[[") || !integer(e[0]) || !expect(",") || !integer(e[1]) || !expect("]") ||
      !expect(",") || !expect("[") || !integer(e[2]) || !expect(",") || !integer(e[3]) ||
      !expect("]]") || !expect("mod")) {
    return fail("expected [[a,b],[c,d]] mod p");
  }
  i64 p = 0;
  if (!integer(p)) return fail("expected modulus");
  skip_ws();
  if (pos != text.size()) return fail("trailing characters");
  const PrimeModulus m = check_prime(p);
  return {FieldElement(e[0], m), FieldElement(e[1], m), FieldElement(e[2], m),
          FieldElement(e[3], m)};
}

}  // namespace hyperlab

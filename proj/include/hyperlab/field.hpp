#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>

#include "hyperlab/error.hpp"

namespace hyperlab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

/// Largest admissible modulus. Products of two residues fit in 128 bits.
inline constexpr u64 kMaxModulus = (u64{1} << 61) - 1;

namespace detail {

constexpr u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

constexpr u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

// Deterministic Miller-Rabin; the first twelve prime bases are exact below 3.3e24.
constexpr bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  constexpr std::array<u64, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 q : bases) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (u64 a : bases) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace detail

class PrimeModulus;
PrimeModulus check_prime(i64 n);

/// An odd prime p <= 2^61-1. Only check_prime() constructs one, so holding a
/// PrimeModulus is proof of primality.
///
/// Besides identifying the field, this class carries the raw-residue kernels
/// (u64 in [0, p)) that the counting code runs on.
class PrimeModulus {
 public:
  constexpr u64 value() const noexcept { return p_; }

  constexpr u64 reduce(i64 n) const noexcept {
    i64 r = n % static_cast<i64>(p_);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(p_) : r);
  }
  constexpr u64 add(u64 x, u64 y) const noexcept {
    u64 s = x + y;
    return s >= p_ ? s - p_ : s;
  }
  constexpr u64 sub(u64 x, u64 y) const noexcept { return x >= y ? x - y : x + p_ - y; }
  constexpr u64 neg(u64 x) const noexcept { return x == 0 ? 0 : p_ - x; }
  constexpr u64 mul(u64 x, u64 y) const noexcept { return detail::mulmod(x, y, p_); }
  constexpr u64 pow(u64 x, u64 e) const noexcept { return detail::powmod(x, e, p_); }

  /// Inverse by the extended Euclidean algorithm. Throws DivisionByZero for 0.
  constexpr u64 inv(u64 x) const {
    if (x == 0) throw DivisionByZero();
    i128 t = 0, new_t = 1;
    i128 r = p_, new_r = x;
    while (new_r != 0) {
      const i128 q = r / new_r;
      const i128 tt = t - q * new_t;
      t = new_t;
      new_t = tt;
      const i128 rr = r - q * new_r;
      r = new_r;
      new_r = rr;
    }
    if (t < 0) t += p_;
    return static_cast<u64>(t);
  }

  /// Euler's criterion; 0 counts as a square.
  constexpr bool is_square(u64 x) const noexcept {
    return x == 0 || pow(x, (p_ - 1) / 2) == 1;
  }

  /// Tonelli-Shanks. Returns some root y with y^2 = x, or nullopt for non-squares.
  std::optional<u64> sqrt(u64 x) const noexcept {
    if (x == 0) return u64{0};
    if (!is_square(x)) return std::nullopt;
    if (p_ % 4 == 3) return pow(x, (p_ + 1) / 4);
    u64 q = p_ - 1;
    int s = 0;
    while ((q & 1U) == 0) {
      q >>= 1U;
      ++s;
    }
    u64 z = 2;
    while (is_square(z)) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = pow(z, q);
    u64 t = pow(x, q);
    u64 r = pow(x, (q + 1) / 2);
    while (t != 1) {
      u64 i = 0;
      u64 tt = t;
      while (tt != 1) {
        tt = mul(tt, tt);
        ++i;
      }
      u64 b = c;
      for (u64 j = 0; j + i + 1 < m; ++j) b = mul(b, b);
      m = i;
      c = mul(b, b);
      t = mul(t, c);
      r = mul(r, b);
    }
    return r;
  }

  friend constexpr bool operator==(PrimeModulus, PrimeModulus) = default;
  friend PrimeModulus check_prime(i64 n);

 private:
  constexpr explicit PrimeModulus(u64 p) noexcept : p_(p) {}
  u64 p_;
};

/// Verifies n is an odd prime in [3, 2^61-1].
inline PrimeModulus check_prime(i64 n) {
  if (n < 3 || static_cast<u64>(n) > kMaxModulus || (n & 1) == 0 ||
      !detail::is_prime_u64(static_cast<u64>(n))) {
    throw NotAPrime(n);
  }
  return PrimeModulus(static_cast<u64>(n));
}

/// Canonical residue in [0, p) tagged with its modulus.
class FieldElement {
 public:
  /// Reduces any signed integer into [0, p).
  FieldElement(i64 n, PrimeModulus m) noexcept : value_(m.reduce(n)), mod_(m) {}

  /// For values already known to be canonical (kernel output).
  static FieldElement from_residue(u64 v, PrimeModulus m) {
    if (v >= m.value()) throw StructuralError("residue out of range");
    return FieldElement(v, m, 0);
  }

  u64 value() const noexcept { return value_; }
  PrimeModulus modulus() const noexcept { return mod_; }
  bool is_zero() const noexcept { return value_ == 0; }

  FieldElement inverse() const { return {mod_.inv(value_), mod_, 0}; }
  bool is_square() const noexcept { return mod_.is_square(value_); }

  friend FieldElement operator+(FieldElement x, FieldElement y) {
    check_same(x, y);
    return {x.mod_.add(x.value_, y.value_), x.mod_, 0};
  }
  friend FieldElement operator-(FieldElement x, FieldElement y) {
    check_same(x, y);
    return {x.mod_.sub(x.value_, y.value_), x.mod_, 0};
  }
  friend FieldElement operator*(FieldElement x, FieldElement y) {
    check_same(x, y);
    return {x.mod_.mul(x.value_, y.value_), x.mod_, 0};
  }
  friend FieldElement operator/(FieldElement x, FieldElement y) { return x * y.inverse(); }
  FieldElement operator-() const noexcept { return {mod_.neg(value_), mod_, 0}; }

  friend bool operator==(FieldElement x, FieldElement y) noexcept {
    return x.mod_ == y.mod_ && x.value_ == y.value_;
  }
  // Orders by residue; only meaningful within one modulus.
  friend std::strong_ordering operator<=>(FieldElement x, FieldElement y) noexcept {
    return x.value_ <=> y.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, FieldElement x) { return os << x.value_; }

 private:
  FieldElement(u64 v, PrimeModulus m, int) noexcept : value_(v), mod_(m) {}

  static void check_same(FieldElement x, FieldElement y) {
    if (!(x.mod_ == y.mod_)) throw StructuralError("field elements have different moduli");
  }

  u64 value_;
  PrimeModulus mod_;
};

enum class ArithOp { kAdd, kSub, kMul, kNeg };

/// Unary kNeg ignores y (but still requires a shared modulus).
inline FieldElement fp_arith(FieldElement x, FieldElement y, ArithOp op) {
  switch (op) {
    case ArithOp::kAdd:
      return x + y;
    case ArithOp::kSub:
      return x - y;
    case ArithOp::kMul:
      return x * y;
    case ArithOp::kNeg:
      if (!(x.modulus() == y.modulus())) {
        throw StructuralError("field elements have different moduli");
      }
      return -x;
  }
  throw StructuralError("unknown arithmetic op");
}

inline FieldElement fp_inv(FieldElement x) { return x.inverse(); }
inline bool fp_is_square(FieldElement x) noexcept { return x.is_square(); }

}  // namespace hyperlab

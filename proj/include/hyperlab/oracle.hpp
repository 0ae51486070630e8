#pragma once

// Brute-force reference counts. Nothing here calls into counts.hpp,
// histogram.hpp or the closed-form products of moebius.hpp: matrices are
// plain arrays multiplied out by hand, inverses come from Fermat's little
// theorem, and set membership is a linear scan.

#include <array>
#include <vector>

#include "hyperlab/error.hpp"
#include "hyperlab/sets.hpp"

namespace hyperlab::oracle {

inline constexpr u64 kEnergyMaxH = 32;
inline constexpr u64 kT3MaxH = 10;
inline constexpr u64 kQMaxH = 32;
inline constexpr u64 kExhaustiveMaxP = 61;

namespace naive {

using Mat = std::array<u64, 4>;

inline u64 mulm(u64 x, u64 y, u64 p) { return static_cast<u64>(static_cast<u128>(x) * y % p); }

inline u64 fermat_inv(u64 x, u64 p) {
  u64 r = 1, e = p - 2;
  while (e != 0) {
    if (e & 1U) r = mulm(r, x, p);
    x = mulm(x, x, p);
    e >>= 1U;
  }
  return r;
}

inline Mat product(const Mat& x, const Mat& y, u64 p) {
  return {(mulm(x[0], y[0], p) + mulm(x[1], y[2], p)) % p,
          (mulm(x[0], y[1], p) + mulm(x[1], y[3], p)) % p,
          (mulm(x[2], y[0], p) + mulm(x[3], y[2], p)) % p,
          (mulm(x[2], y[1], p) + mulm(x[3], y[3], p)) % p};
}

// Exact inverse: adjugate divided by the determinant.
inline Mat inverse(const Mat& x, u64 p) {
  const u64 det = (mulm(x[0], x[3], p) + p - mulm(x[1], x[2], p)) % p;
  const u64 s = fermat_inv(det, p);
  return {mulm(x[3], s, p), mulm((p - x[1]) % p, s, p), mulm((p - x[2]) % p, s, p),
          mulm(x[0], s, p)};
}

inline Mat translate_matrix(const Translate& h, u64 p) {
  const u64 a = h.a.value(), b = h.b.value();
  return {(p - a) % p, (mulm(a, b, p) + 1) % p, p - 1, b};
}

inline bool member(const ScalarSet& s, u64 v) {
  for (const auto& x : s) {
    if (x.value() == v) return true;
  }
  return false;
}

inline void budget(u64 n, u64 limit, const char* what) {
  if (n > limit) throw ResourceLimit(what, n, limit);
}

}  // namespace naive

/// σ(A, H) by a double loop with linear-scan membership.
inline u64 sigma_naive(const ScalarSet& a, const TranslateSet& h, FieldElement lambda) {
  if (lambda.is_zero()) throw InvalidArgument("lambda must be nonzero");
  const u64 p = a.modulus().value();
  u64 count = 0;
  for (const auto& t : h) {
    for (const auto& x : a) {
      // (x - b)(y - a) = lambda  ⇔  y = a + lambda/(x - b)
      const u64 gap = (x.value() + p - t.b.value()) % p;
      if (gap == 0) continue;
      const u64 y = (t.a.value() + naive::mulm(lambda.value(), naive::fermat_inv(gap, p), p)) % p;
      if (naive::member(a, y)) ++count;
    }
  }
  return count;
}

/// E(H) by looping over H⁴ and comparing h1 h2⁻¹ with h1' h2'⁻¹ entrywise.
inline u64 energy_naive(const TranslateSet& h) {
  naive::budget(h.size(), kEnergyMaxH, "energy_naive |H|");
  const u64 p = h.modulus().value();
  std::vector<naive::Mat> quotients;
  for (const auto& x : h) {
    for (const auto& y : h) {
      quotients.push_back(naive::product(naive::translate_matrix(x, p),
                                         naive::inverse(naive::translate_matrix(y, p), p), p));
    }
  }
  u64 count = 0;
  for (const auto& u : quotients) {
    for (const auto& v : quotients) count += (u == v) ? 1 : 0;
  }
  return count;
}

/// T3(H) by looping over H⁶.
inline u64 t3_naive(const TranslateSet& h) {
  naive::budget(h.size(), kT3MaxH, "t3_naive |H|");
  const u64 p = h.modulus().value();
  std::vector<naive::Mat> mats, invs;
  for (const auto& x : h) {
    mats.push_back(naive::translate_matrix(x, p));
    invs.push_back(naive::inverse(mats.back(), p));
  }
  const std::size_t n = mats.size();
  std::vector<naive::Mat> words;
  words.reserve(n * n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const naive::Mat left = naive::product(mats[i], invs[j], p);
      for (std::size_t k = 0; k < n; ++k) words.push_back(naive::product(left, mats[k], p));
    }
  }
  u64 count = 0;
  for (const auto& u : words) {
    for (const auto& v : words) count += (u == v) ? 1 : 0;
  }
  return count;
}

/// Q(H) by looping over H⁴ and testing D(h1, h1') = D(h2, h2').
inline u64 q_naive(const TranslateSet& h) {
  naive::budget(h.size(), kQMaxH, "q_naive |H|");
  const u64 p = h.modulus().value();
  auto dist = [p](const Translate& x, const Translate& y) {
    return naive::mulm((x.a.value() + p - y.a.value()) % p, (x.b.value() + p - y.b.value()) % p, p);
  };
  u64 count = 0;
  for (const auto& h1 : h) {
    for (const auto& h1p : h) {
      const u64 d = dist(h1, h1p);
      for (const auto& h2 : h) {
        for (const auto& h2p : h) count += (dist(h2, h2p) == d) ? 1 : 0;
      }
    }
  }
  return count;
}

struct RichResult {
  u64 k;
  u64 count;
  std::vector<Translate> witnesses;
};

/// m_k over every (a, b) ∈ F_p², counting x ∈ A, x ≠ b, with a + λ'/(b - x) ∈ A, λ' = -lambda.
inline RichResult mk_exhaustive(const ScalarSet& a, u64 k, FieldElement lambda) {
  const PrimeModulus m = a.modulus();
  const u64 p = m.value();
  naive::budget(p, kExhaustiveMaxP, "mk_exhaustive p");
  if (lambda.is_zero()) throw InvalidArgument("lambda must be nonzero");
  const u64 numerator = (p - lambda.value()) % p;
  RichResult out{k, 0, {}};
  for (u64 av = 0; av < p; ++av) {
    for (u64 bv = 0; bv < p; ++bv) {
      u64 rich = 0;
      for (const auto& x : a) {
        if (x.value() == bv) continue;
        const u64 y = (av + naive::mulm(numerator, naive::fermat_inv((bv + p - x.value()) % p, p), p)) % p;
        if (naive::member(a, y)) ++rich;
      }
      if (rich >= k) {
        ++out.count;
        out.witnesses.push_back({FieldElement::from_residue(av, m), FieldElement::from_residue(bv, m)});
      }
    }
  }
  return out;
}

}  // namespace hyperlab::oracle

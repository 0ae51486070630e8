#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyperlab/field.hpp"

namespace hyperlab {

/// Full matrix entries (a, b, c, d); never a lossy digest.
using MatrixKey = std::array<u64, 4>;

struct MatrixKeyHash {
  std::size_t operator()(const MatrixKey& k) const noexcept {
    u64 h = 0x9e3779b97f4a7c15ULL;
    for (u64 v : k) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6U) + (h >> 2U);
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= h >> 31U;
    }
    return static_cast<std::size_t>(h);
  }
};

struct PairKeyHash {
  std::size_t operator()(const std::pair<u64, u64>& k) const noexcept {
    return MatrixKeyHash{}({k.first, k.second, 0, 0});
  }
};

namespace detail {

inline u64 checked_u64(u128 x, const char* what) {
  if (x > std::numeric_limits<u64>::max()) throw Error(std::string(what) + " overflows 64 bits");
  return static_cast<u64>(x);
}

}  // namespace detail

/// Associative table key → multiplicity: the carrier of a representation
/// function r(x). Every stored count is >= 1.
template <class Key, class Hash = std::hash<Key>>
class CountHistogram {
 public:
  using map_type = std::unordered_map<Key, u64, Hash>;

  CountHistogram() = default;
  explicit CountHistogram(std::size_t expected_support) { table_.reserve(expected_support); }

  void add(const Key& key, u64 n = 1) {
    if (n != 0) table_[key] += n;
  }

  void merge(const CountHistogram& other) {
    for (const auto& [k, n] : other.table_) table_[k] += n;
  }

  u64 at(const Key& key) const {
    auto it = table_.find(key);
    return it == table_.end() ? 0 : it->second;
  }

  std::size_t support_size() const noexcept { return table_.size(); }
  bool empty() const noexcept { return table_.empty(); }

  u64 total_mass() const {
    u128 s = 0;
    for (const auto& [k, n] : table_) s += n;
    return detail::checked_u64(s, "histogram mass");
  }

  /// Σ r(x)², the energy of the representation function.
  u64 sum_of_squares() const {
    u128 s = 0;
    for (const auto& [k, n] : table_) s += static_cast<u128>(n) * n;
    return detail::checked_u64(s, "histogram energy");
  }

  /// Entries sorted by key, for deterministic output.
  std::vector<std::pair<Key, u64>> sorted_entries() const {
    std::vector<std::pair<Key, u64>> v(table_.begin(), table_.end());
    std::sort(v.begin(), v.end());
    return v;
  }

  auto begin() const noexcept { return table_.begin(); }
  auto end() const noexcept { return table_.end(); }
  const map_type& table() const noexcept { return table_; }

 private:
  map_type table_;
};

using ScalarHistogram = CountHistogram<u64>;
using MatrixHistogram = CountHistogram<MatrixKey, MatrixKeyHash>;

// ---------------------------------------------------------------------------
// Budgets
// ---------------------------------------------------------------------------

/// Per-quantity limits. Exceeding any of them raises ResourceLimit before work starts.
struct Budget {
  u64 max_h_t3 = 512;            // |H| for T3 enumeration
  u64 max_t4_support = 4096;     // support of the quotient histogram fed to T4
  u64 max_exhaustive_p = 4096;   // p for the p² translate scan
  u64 table_mb = 2048;           // counting-table memory, HYPERLAB_BUDGET_MB

  static constexpr u64 kBytesPerEntry = 64;  // key + count + node overhead, rough

  /// Defaults, with table_mb overridden by HYPERLAB_BUDGET_MB when set.
  static Budget from_env() {
    Budget b;
    if (const char* env = std::getenv("HYPERLAB_BUDGET_MB"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0' || v == 0) {
        throw InvalidArgument(std::string("HYPERLAB_BUDGET_MB must be a positive integer, got ") +
                              env);
      }
      b.table_mb = v;
    }
    return b;
  }

  void check_table(u128 entries, const std::string& what) const {
    const u128 bytes = entries * kBytesPerEntry;
    const u128 limit = static_cast<u128>(table_mb) << 20U;
    if (bytes > limit) {
      const u128 mb = (bytes + (1U << 20U) - 1) >> 20U;
      throw ResourceLimit(what + " table (MB)",
                          static_cast<u64>(std::min<u128>(mb, std::numeric_limits<u64>::max())),
                          table_mb);
    }
  }
};

// ---------------------------------------------------------------------------
// Sharded enumeration
//
// Index ranges are split into contiguous blocks, each worker fills a private
// table, and the tables are merged by addition. Integer addition commutes, so
// results do not depend on the worker count or merge order.
// ---------------------------------------------------------------------------

template <class Hist, class Body>
Hist sharded_histogram(std::size_t n, unsigned workers, Body&& body) {
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    Hist h;
    for (std::size_t i = 0; i < n; ++i) body(i, h);
    return h;
  }
  std::vector<Hist> parts(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      pool.emplace_back([&, lo, hi, w] {
        for (std::size_t i = lo; i < hi; ++i) body(i, parts[w]);
      });
    }
  }
  Hist out = std::move(parts.front());
  for (unsigned w = 1; w < workers; ++w) out.merge(parts[w]);
  return out;
}

/// Σ body(i) over [0, n), sharded the same way.
template <class Body>
u64 sharded_sum(std::size_t n, unsigned workers, Body&& body) {
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<u128> parts(workers, 0);
  auto run = [&](unsigned w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    for (std::size_t i = lo; i < hi; ++i) parts[w] += body(i);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  u128 total = 0;
  for (u128 x : parts) total += x;
  return detail::checked_u64(total, "sharded sum");
}

// ---------------------------------------------------------------------------
// Exact rationals for the proof-replay quantities
// ---------------------------------------------------------------------------

/// Nonnegative rational num/den in lowest terms.
class Rational {
 public:
  Rational(u128 num, u128 den) {
    if (den == 0) throw DivisionByZero();
    const u128 g = gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  u128 num() const noexcept { return num_; }
  u128 den() const noexcept { return den_; }
  double to_double() const noexcept {
    return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
  }

  std::string to_string() const { return u128_to_string(num_) + "/" + u128_to_string(den_); }

  /// Exact test n >= this.
  bool le_integer(u64 n) const noexcept { return num_ <= static_cast<u128>(n) * den_; }

  friend bool operator==(const Rational&, const Rational&) = default;

  static std::string u128_to_string(u128 x) {
    if (x == 0) return "0";
    std::string s;
    while (x != 0) {
      s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
      x /= 10;
    }
    return {s.rbegin(), s.rend()};
  }

 private:
  static u128 gcd(u128 a, u128 b) noexcept {
    while (b != 0) {
      const u128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  u128 num_;
  u128 den_;
};

}  // namespace hyperlab

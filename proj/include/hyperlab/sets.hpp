#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <set>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "hyperlab/field.hpp"
#include "hyperlab/moebius.hpp"

namespace hyperlab {

/// Finite subset of F_p, sorted ascending and free of duplicates.
class ScalarSet {
 public:
  explicit ScalarSet(PrimeModulus m) noexcept : mod_(m) {}

  ScalarSet(PrimeModulus m, std::vector<FieldElement> elems) : mod_(m), elems_(std::move(elems)) {
    for (const auto& x : elems_) {
      if (!(x.modulus() == m)) throw StructuralError("set element has a different modulus");
    }
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  }

  static ScalarSet of(PrimeModulus m, std::initializer_list<i64> values) {
    std::vector<FieldElement> v;
    v.reserve(values.size());
    for (i64 x : values) v.emplace_back(x, m);
    return {m, std::move(v)};
  }

  PrimeModulus modulus() const noexcept { return mod_; }
  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }
  const std::vector<FieldElement>& elements() const noexcept { return elems_; }
  auto begin() const noexcept { return elems_.begin(); }
  auto end() const noexcept { return elems_.end(); }

  bool contains(FieldElement x) const {
    return x.modulus() == mod_ && std::binary_search(elems_.begin(), elems_.end(), x);
  }

  friend bool operator==(const ScalarSet& x, const ScalarSet& y) {
    return x.mod_ == y.mod_ && x.elems_ == y.elems_;
  }

 private:
  PrimeModulus mod_;
  std::vector<FieldElement> elems_;
};

/// Finite set of translates (a, b), sorted lexicographically and free of duplicates.
class TranslateSet {
 public:
  explicit TranslateSet(PrimeModulus m) noexcept : mod_(m) {}

  TranslateSet(PrimeModulus m, std::vector<Translate> elems) : mod_(m), elems_(std::move(elems)) {
    for (const auto& h : elems_) {
      if (!(h.a.modulus() == m && h.b.modulus() == m)) {
        throw StructuralError("translate has a different modulus");
      }
    }
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  }

  static TranslateSet of(PrimeModulus m, std::initializer_list<std::pair<i64, i64>> pairs) {
    std::vector<Translate> v;
    v.reserve(pairs.size());
    for (auto [a, b] : pairs) v.push_back({FieldElement(a, m), FieldElement(b, m)});
    return {m, std::move(v)};
  }

  PrimeModulus modulus() const noexcept { return mod_; }
  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }
  const std::vector<Translate>& elements() const noexcept { return elems_; }
  auto begin() const noexcept { return elems_.begin(); }
  auto end() const noexcept { return elems_.end(); }

  bool contains(const Translate& h) const {
    return std::binary_search(elems_.begin(), elems_.end(), h);
  }

  friend bool operator==(const TranslateSet& x, const TranslateSet& y) {
    return x.mod_ == y.mod_ && x.elems_ == y.elems_;
  }

 private:
  PrimeModulus mod_;
  std::vector<Translate> elems_;
};

using AnySet = std::variant<ScalarSet, TranslateSet>;

// ---------------------------------------------------------------------------
// Seeded random generation
// ---------------------------------------------------------------------------

namespace detail {

// Uniform draw in [0, n) by rejection on raw mt19937_64 output. The standard
// distributions are implementation-defined, which would break reproducibility
// across standard libraries.
inline u64 uniform_below(std::mt19937_64& rng, u64 n) {
  const u64 max = std::numeric_limits<u64>::max();
  const u64 limit = max - (max % n + 1) % n;
  for (;;) {
    const u64 x = rng();
    if (x <= limit) return x % n;
  }
}

inline constexpr u64 kShuffleDomainLimit = u64{1} << 20;

// count distinct indices from [0, n), n >= count, in draw order.
inline std::vector<u64> sample_indices(u64 n, u64 count, u64 seed) {
  std::mt19937_64 rng(seed);
  std::vector<u64> out;
  out.reserve(count);
  if (n <= kShuffleDomainLimit) {
    std::vector<u64> idx(n);
    for (u64 i = 0; i < n; ++i) idx[i] = i;
    for (u64 i = 0; i < count; ++i) {
      const u64 j = i + uniform_below(rng, n - i);
      std::swap(idx[i], idx[j]);
      out.push_back(idx[i]);
    }
    return out;
  }
  std::unordered_set<u64> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    const u64 x = uniform_below(rng, n);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// count distinct residues drawn uniformly from F_p. Small fields use a partial
/// Fisher-Yates shuffle of [0, p); large ones use rejection sampling.
inline ScalarSet random_scalar_set(PrimeModulus m, u64 count, u64 seed) {
  if (count > m.value()) throw InvalidArgument("random set larger than the field");
  std::vector<FieldElement> v;
  v.reserve(count);
  for (u64 i : detail::sample_indices(m.value(), count, seed)) {
    v.push_back(FieldElement::from_residue(i, m));
  }
  return {m, std::move(v)};
}

/// count distinct translates drawn uniformly from F_p².
inline TranslateSet random_translate_set(PrimeModulus m, u64 count, u64 seed) {
  const u64 p = m.value();
  std::vector<Translate> v;
  v.reserve(count);
  if (static_cast<u128>(p) * p <= detail::kShuffleDomainLimit) {
    if (count > p * p) throw InvalidArgument("random translate set larger than F_p^2");
    for (u64 i : detail::sample_indices(p * p, count, seed)) {
      v.push_back({FieldElement::from_residue(i / p, m), FieldElement::from_residue(i % p, m)});
    }
    return {m, std::move(v)};
  }
  std::mt19937_64 rng(seed);
  std::set<std::pair<u64, u64>> seen;
  while (v.size() < count) {
    const u64 a = detail::uniform_below(rng, p);
    const u64 b = detail::uniform_below(rng, p);
    if (seen.emplace(a, b).second) {
      v.push_back({FieldElement::from_residue(a, m), FieldElement::from_residue(b, m)});
    }
  }
  return {m, std::move(v)};
}

// ---------------------------------------------------------------------------
// Set algebra used by the proof-replay reports
// ---------------------------------------------------------------------------

inline ScalarSet sumset(const ScalarSet& x, const ScalarSet& y) {
  std::vector<FieldElement> v;
  v.reserve(x.size() * y.size());
  for (const auto& s : x) {
    for (const auto& t : y) v.push_back(s + t);
  }
  return {x.modulus(), std::move(v)};
}

inline ScalarSet difference_set(const ScalarSet& x, const ScalarSet& y) {
  std::vector<FieldElement> v;
  v.reserve(x.size() * y.size());
  for (const auto& s : x) {
    for (const auto& t : y) v.push_back(s - t);
  }
  return {x.modulus(), std::move(v)};
}

/// S ∪ S⁻¹; zero stays in the set but contributes no inverse.
inline ScalarSet inverse_union(const ScalarSet& s) {
  std::vector<FieldElement> v(s.begin(), s.end());
  for (const auto& x : s) {
    if (!x.is_zero()) v.push_back(x.inverse());
  }
  return {s.modulus(), std::move(v)};
}

// ---------------------------------------------------------------------------
// Set-spec mini-language
//
//   scalar := "ap:" int "," int "," count | "gp:" int "," int "," count
//           | "random:" count ["," seed] | "list:" int ("," int)* | "invunion:" scalar
//   hspec  := "cart:" scalar ";" scalar | "randomh:" count ["," seed]
//           | "listh:" pair (";" pair)*          pair := int "," int
//
// Integers are signed decimals of any length, reduced mod p.
// ---------------------------------------------------------------------------

namespace detail {

class SpecParser {
 public:
  SpecParser(std::string_view text, PrimeModulus m) : text_(text), mod_(m) {}

  AnySet parse_any() {
    AnySet out = is_translate_spec() ? AnySet(translates()) : AnySet(scalar());
    finish();
    return out;
  }

  ScalarSet parse_scalar() {
    ScalarSet s = scalar();
    finish();
    return s;
  }

  TranslateSet parse_translates() {
    TranslateSet h = translates();
    finish();
    return h;
  }

  bool is_translate_spec() const {
    for (std::string_view kw : {"cart:", "randomh:", "listh:"}) {
      if (text_.substr(pos_).starts_with(kw)) return true;
    }
    return false;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw InvalidSpec(what, pos_); }

  bool accept(std::string_view tok) {
    if (!text_.substr(pos_).starts_with(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void finish() const {
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  // Signed decimal reduced mod p digit by digit, so magnitude is unbounded.
  FieldElement integer() {
    bool negative = false;
    if (at('-') || at('+')) {
      negative = at('-');
      ++pos_;
    }
    const std::size_t start = pos_;
    u64 r = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      r = mod_.add(mod_.mul(r, 10 % mod_.value()),
                   static_cast<u64>(text_[pos_] - '0') % mod_.value());
      ++pos_;
    }
    if (pos_ == start) fail("expected integer");
    auto x = FieldElement::from_residue(r, mod_);
    return negative ? -x : x;
  }

  u64 natural(const char* what) {
    const std::size_t start = pos_;
    u64 r = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const u64 digit = static_cast<u64>(text_[pos_] - '0');
      if (r > (std::numeric_limits<u64>::max() - digit) / 10) fail(std::string(what) + " overflows");
      r = r * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + what);
    return r;
  }

  u64 count() {
    const std::size_t at_count = pos_;
    const u64 n = natural("count");
    if (n == 0) throw InvalidSpec("element count 0", at_count);
    return n;
  }

  ScalarSet scalar() {
    const std::size_t start = pos_;
    if (accept("ap:") || accept("gp:")) {
      const bool geometric = text_[start] == 'g';
      const FieldElement first = integer();
      expect(',');
      const std::size_t at_step = pos_;
      const FieldElement step = integer();
      expect(',');
      const u64 n = count();
      if (step.is_zero()) {
        throw InvalidSpec(geometric ? "geometric ratio is 0 mod p" : "arithmetic step is 0 mod p",
                          at_step);
      }
      std::vector<FieldElement> v;
      v.reserve(std::min<u64>(n, mod_.value()));
      // Both progressions repeat with period at most p.
      FieldElement x = first;
      for (u64 i = 0; i < std::min<u64>(n, mod_.value()); ++i) {
        v.push_back(x);
        x = geometric ? x * step : x + step;
      }
      return {mod_, std::move(v)};
    }
    if (accept("random:")) {
      const u64 n = count();
      u64 seed = 0;
      if (at(',')) {
        ++pos_;
        seed = natural("seed");
      }
      if (n > mod_.value()) throw InvalidSpec("random count exceeds p", start);
      return random_scalar_set(mod_, n, seed);
    }
    if (accept("list:")) {
      std::vector<FieldElement> v{integer()};
      while (at(',')) {
        ++pos_;
        v.push_back(integer());
      }
      return {mod_, std::move(v)};
    }
    if (accept("invunion:")) return inverse_union(scalar());
    fail("expected one of ap:, gp:, random:, list:, invunion:");
  }

  TranslateSet translates() {
    const std::size_t start = pos_;
    if (accept("cart:")) {
      ScalarSet b = scalar();
      expect(';');
      ScalarSet c = scalar();
      std::vector<Translate> v;
      v.reserve(b.size() * c.size());
      for (const auto& a : b) {
        for (const auto& y : c) v.push_back({a, y});
      }
      return {mod_, std::move(v)};
    }
    if (accept("randomh:")) {
      const u64 n = count();
      u64 seed = 0;
      if (at(',')) {
        ++pos_;
        seed = natural("seed");
      }
      if (static_cast<u128>(n) > static_cast<u128>(mod_.value()) * mod_.value()) {
        throw InvalidSpec("random count exceeds p^2", start);
      }
      return random_translate_set(mod_, n, seed);
    }
    if (accept("listh:")) {
      std::vector<Translate> v;
      do {
        const FieldElement a = integer();
        expect(',');
        v.push_back({a, integer()});
      } while (at(';') && (++pos_, true));
      return {mod_, std::move(v)};
    }
    fail("expected one of cart:, randomh:, listh:");
  }

  std::string_view text_;
  PrimeModulus mod_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses either kind of set spec; translate specs are recognised by their keyword.
inline AnySet parse_setspec(std::string_view text, PrimeModulus m) {
  return detail::SpecParser(text, m).parse_any();
}

inline ScalarSet parse_scalar_spec(std::string_view text, PrimeModulus m) {
  return detail::SpecParser(text, m).parse_scalar();
}

inline TranslateSet parse_translate_spec(std::string_view text, PrimeModulus m) {
  return detail::SpecParser(text, m).parse_translates();
}

/// "list:..." form. An empty set renders as "list:" which does not re-parse.
inline std::string render(const ScalarSet& s) {
  std::string out = "list:";
  bool first = true;
  for (const auto& x : s) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(x.value());
  }
  return out;
}

inline std::string render(const TranslateSet& h) {
  std::string out = "listh:";
  bool first = true;
  for (const auto& t : h) {
    if (!first) out += ';';
    first = false;
    out += std::to_string(t.a.value()) + "," + std::to_string(t.b.value());
  }
  return out;
}

namespace detail {

// Calls parse(line) for each data line; blank lines and '#' comments are skipped.
// InvalidSpec positions are rebased to byte offsets into the file.
template <class Parse>
void for_each_data_line(const std::string& path, std::string_view prefix, Parse&& parse) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open set file");
  std::string line;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string body = line.substr(first, last - first + 1);
    try {
      parse(std::string(prefix) + body);
    } catch (const InvalidSpec& e) {
      const std::size_t col = e.position() > prefix.size() ? e.position() - prefix.size() : 0;
      throw InvalidSpec(path + " line " + std::to_string(line_no) + ": " + e.what(),
                        line_start + first + col);
    }
  }
}

}  // namespace detail

/// One integer per line.
inline ScalarSet read_scalar_file(const std::string& path, PrimeModulus m) {
  std::vector<FieldElement> v;
  detail::for_each_data_line(path, "list:", [&](const std::string& spec) {
    if (spec.find(',') != std::string::npos) throw InvalidSpec("one integer per line", spec.find(','));
    v.push_back(parse_scalar_spec(spec, m).elements().front());
  });
  return {m, std::move(v)};
}

/// One "a,b" pair per line.
inline TranslateSet read_translate_file(const std::string& path, PrimeModulus m) {
  std::vector<Translate> v;
  detail::for_each_data_line(path, "listh:", [&](const std::string& spec) {
    if (spec.find(';') != std::string::npos) throw InvalidSpec("one pair per line", spec.find(';'));
    v.push_back(parse_translate_spec(spec, m).elements().front());
  });
  return {m, std::move(v)};
}

// ---------------------------------------------------------------------------
// Structural operations on translate sets
// ---------------------------------------------------------------------------

/// All pairs (a, b) with a ∈ B, b ∈ C.
inline TranslateSet gen_cartesian(const ScalarSet& b, const ScalarSet& c) {
  if (!(b.modulus() == c.modulus())) throw StructuralError("sets have different moduli");
  std::vector<Translate> v;
  v.reserve(b.size() * c.size());
  for (const auto& x : b) {
    for (const auto& y : c) v.push_back({x, y});
  }
  return {b.modulus(), std::move(v)};
}

namespace detail {

struct LineLoads {
  std::map<u64, u64> by_a;  // translates sharing the first coordinate
  std::map<u64, u64> by_b;  // translates sharing the second coordinate
};

inline LineLoads line_loads(const TranslateSet& h) {
  LineLoads loads;
  for (const auto& t : h) {
    ++loads.by_a[t.a.value()];
    ++loads.by_b[t.b.value()];
  }
  return loads;
}

}  // namespace detail

/// M: the largest number of translates sharing an abscissa or an ordinate.
inline u64 max_line_multiplicity(const TranslateSet& h) {
  if (h.empty()) throw EmptyInput("max_line_multiplicity of an empty translate set");
  const auto loads = detail::line_loads(h);
  u64 best = 0;
  for (const auto& [v, n] : loads.by_a) best = std::max(best, n);
  for (const auto& [v, n] : loads.by_b) best = std::max(best, n);
  return best;
}

struct PruneResult {
  TranslateSet kept;
  TranslateSet removed;
};

/// Removes every translate lying on a horizontal or vertical line that carries
/// at least threshold translates of h. max_line_multiplicity(kept) < threshold.
inline PruneResult prune_rich_lines(const TranslateSet& h, u64 threshold) {
  if (threshold < 1) throw InvalidArgument("prune threshold must be >= 1");
  const auto loads = detail::line_loads(h);
  std::vector<Translate> kept, removed;
  for (const auto& t : h) {
    const bool rich = loads.by_a.at(t.a.value()) >= threshold ||
                      loads.by_b.at(t.b.value()) >= threshold;
    (rich ? removed : kept).push_back(t);
  }
  return {TranslateSet(h.modulus(), std::move(kept)), TranslateSet(h.modulus(), std::move(removed))};
}

/// (x, y) ↦ ((x + y)/2, (x - y)/2), applied to (a, b).
inline TranslateSet rotate_coordinates(const TranslateSet& h) {
  const PrimeModulus m = h.modulus();
  const FieldElement half = FieldElement(2, m).inverse();
  std::vector<Translate> v;
  v.reserve(h.size());
  for (const auto& t : h) v.push_back({(t.a + t.b) * half, (t.a - t.b) * half});
  return {m, std::move(v)};
}

/// Inverse of rotate_coordinates: (u, v) ↦ (u + v, u - v).
inline TranslateSet unrotate_coordinates(const TranslateSet& h) {
  std::vector<Translate> v;
  v.reserve(h.size());
  for (const auto& t : h) v.push_back({t.a + t.b, t.a - t.b});
  return {h.modulus(), std::move(v)};
}

}  // namespace hyperlab

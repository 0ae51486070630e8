#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hyperlab/bounds.hpp"
#include "hyperlab/counts.hpp"
#include "hyperlab/oracle.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/sets.hpp"

namespace hyperlab {

struct ExperimentConfig {
  std::optional<i64> p;
  i64 lambda = -1;
  std::string a_spec;
  std::string h_spec;
  std::string b_spec;
  std::string c_spec;
  std::optional<u64> k;
  u64 seed = 1;
  std::optional<u64> trials;
  unsigned workers = 1;
  Budget budget{};
  std::string out;  // empty: stdout
  ReportFormat format = ReportFormat::kCsv;
  std::string family;
  std::string quantity;
};

/// A fully parsed problem instance.
struct Instance {
  PrimeModulus m;
  FieldElement lambda;
  std::optional<ScalarSet> a;
  std::optional<TranslateSet> h;
  std::optional<ScalarSet> b;
  std::optional<ScalarSet> c;
  bool h_is_cartesian = false;
};

/// Scalar spec, or "file:path" for a file of integers.
inline ScalarSet resolve_scalar(const std::string& spec, PrimeModulus m) {
  if (spec.rfind("file:", 0) == 0) return read_scalar_file(spec.substr(5), m);
  return parse_scalar_spec(spec, m);
}

/// Translate spec, or "file:path" for a file of "a,b" pairs.
inline TranslateSet resolve_translate(const std::string& spec, PrimeModulus m) {
  if (spec.rfind("file:", 0) == 0) return read_translate_file(spec.substr(5), m);
  return parse_translate_spec(spec, m);
}

inline bool is_cartesian(const TranslateSet& h) {
  std::vector<u64> as, bs;
  for (const auto& t : h) {
    as.push_back(t.a.value());
    bs.push_back(t.b.value());
  }
  std::sort(as.begin(), as.end());
  std::sort(bs.begin(), bs.end());
  const auto na = static_cast<u64>(std::unique(as.begin(), as.end()) - as.begin());
  const auto nb = static_cast<u64>(std::unique(bs.begin(), bs.end()) - bs.begin());
  return !h.empty() && na * nb == h.size();
}

inline Instance make_instance(PrimeModulus m, i64 lambda, const std::string& a_spec,
                              const std::string& h_spec, const std::string& b_spec = {},
                              const std::string& c_spec = {}) {
  Instance in{m, FieldElement(lambda, m), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  if (in.lambda.is_zero()) throw InvalidArgument("lambda must be nonzero mod p");
  if (!a_spec.empty()) in.a = resolve_scalar(a_spec, m);
  if (!b_spec.empty()) in.b = resolve_scalar(b_spec, m);
  if (!c_spec.empty()) in.c = resolve_scalar(c_spec, m);
  if (!h_spec.empty()) {
    in.h = resolve_translate(h_spec, m);
  } else if (in.b && in.c) {
    in.h = gen_cartesian(*in.b, *in.c);
  }
  if (in.h) in.h_is_cartesian = is_cartesian(*in.h);
  return in;
}

/// Parses every spec in the config; nothing is computed before this succeeds.
inline Instance prepare(const ExperimentConfig& cfg) {
  if (!cfg.p) throw InvalidArgument("--p is required");
  if (cfg.workers < 1) throw InvalidArgument("--workers must be >= 1");
  return make_instance(check_prime(*cfg.p), cfg.lambda, cfg.a_spec, cfg.h_spec,
                       cfg.b_spec, cfg.c_spec);
}

/// ⌈n^{3/4}⌉, at least 2, computed exactly.
inline u64 default_k(u64 n) {
  u64 k = static_cast<u64>(std::ceil(std::pow(static_cast<double>(n), 0.75)));
  while (k > 1 && static_cast<u128>(k - 1) * (k - 1) * (k - 1) * (k - 1) >=
                      static_cast<u128>(n) * n * n) {
    --k;
  }
  while (static_cast<u128>(k) * k * k * k < static_cast<u128>(n) * n * n) ++k;
  return std::max<u64>(k, 2);
}

inline const std::vector<std::string>& compute_quantities() {
  static const std::vector<std::string> q = {"sigma", "energy", "t3",        "t4",      "q",
                                             "mk",    "lk",     "eplus",     "sumprod", "minkowski",
                                             "cschain", "borel"};
  return q;
}

namespace detail {

inline const ScalarSet& need_a(const Instance& in, const std::string& q) {
  if (!in.a) throw InvalidArgument("quantity '" + q + "' needs --A");
  return *in.a;
}

inline const TranslateSet& need_h(const Instance& in, const std::string& q) {
  if (!in.h) throw InvalidArgument("quantity '" + q + "' needs --H (or --B and --C)");
  return *in.h;
}

inline void need_group_lambda(const Instance& in, const std::string& q) {
  if (in.lambda.value() != in.m.value() - 1) {
    throw InvalidArgument("quantity '" + q +
                          "' is a group-structured count and is only defined for lambda = -1");
  }
}

inline Evaluation fixed(double value, std::string regime) { return {value, std::move(regime), true}; }

inline Evaluation tagged(Evaluation e, const std::string& prefix) {
  e.regime = prefix + ":" + e.regime;
  return e;
}

inline double dsq(u64 x) { return static_cast<double>(x) * static_cast<double>(x); }

}  // namespace detail

/// Computes one quantity on an instance and pairs it with every bound that applies.
inline std::vector<BoundReport> compute_reports(const Instance& in, const std::string& q,
                                                std::optional<u64> k_opt, const CountOptions& opt) {
  using detail::fixed;
  using detail::tagged;
  const u64 p = in.m.value();
  std::vector<BoundReport> out;
  const auto exact = Exactness::kExactConstant;
  const auto asym = Exactness::kAsymptotic;

  if (q == "sigma") {
    const auto& a = detail::need_a(in, q);
    const auto& h = detail::need_h(in, q);
    const u64 s = sigma(a, h, in.lambda, opt.workers);
    const u64 na = a.size(), nh = h.size();
    BoundInputs bi{p, na, nh, std::nullopt, std::nullopt, std::nullopt};
    if (na > 0 && nh > 0) {
      const u64 m = max_line_multiplicity(h);
      bi.m = m;
      const Evaluation s1 = eval_main_theorem(na, nh, m, MainBound::kSigma1);
      const Evaluation s2 = eval_main_theorem(na, nh, m, MainBound::kSigma2);
      out.push_back(make_report("sigma", bi, s, tagged(s1, "sigma1"), asym));
      out.push_back(make_report("sigma", bi, s, tagged(s2, "sigma2"), asym));
      if (in.h_is_cartesian) {
        out.push_back(make_report(
            "sigma", bi, s, tagged(eval_main_theorem(na, nh, m, MainBound::kSigma2Cartesian), "sigma2"),
            asym));
      }
      const FpExtraTerm e1 = eval_fp_extras(na, nh, p, FpExtra::kSigma1Ext);
      const FpExtraTerm e2 = eval_fp_extras(na, nh, p, FpExtra::kSigma2Ext);
      out.push_back(make_report(
          "sigma", bi, s,
          {s1.value + e1.extra, std::string("sigma1_ext:") + (e1.valid ? "valid" : "invalid"),
           s1.applicable && e1.valid},
          asym));
      out.push_back(make_report(
          "sigma", bi, s,
          {s2.value + e2.extra, std::string("sigma2_ext:") + (e2.valid ? "valid" : "invalid"),
           s2.applicable && e2.valid},
          asym));
      out.push_back(make_report("sigma", bi, s, tagged(eval_incidence_hb(na, nh, p), "hb"), asym));
    }
    out.push_back(make_report("charsum", bi, s, eval_charsum(na, nh, p), exact));
    return out;
  }

  if (q == "energy") {
    detail::need_group_lambda(in, q);
    const auto& h = detail::need_h(in, q);
    const u64 e = t_k(h, 2, opt);
    const u64 m = h.empty() ? 0 : max_line_multiplicity(h);
    BoundInputs bi{p, std::nullopt, h.size(), m, std::nullopt, std::nullopt};
    out.push_back(make_report("energy", bi, e, fixed(4.0 * detail::dsq(h.size()) * m, "4H^2M"), exact));
    return out;
  }

  if (q == "t3") {
    detail::need_group_lambda(in, q);
    const auto& h = detail::need_h(in, q);
    const u64 t3 = t_k(h, 3, opt);
    const u64 qq = q_rect(h);
    const u64 m = h.empty() ? 0 : max_line_multiplicity(h);
    const double nh = static_cast<double>(h.size());
    BoundInputs bi{p, std::nullopt, h.size(), m, std::nullopt, std::nullopt};
    out.push_back(make_report(
        "t3", bi, t3, fixed(2.0 * nh * static_cast<double>(qq) + 2.0 * std::pow(nh, 4), "2HQ+2H^4"),
        exact));
    out.push_back(
        make_report("t3", bi, t3, tagged(eval_t3_bounds(h.size(), m, p, T3Bound::kLemmaT3Bd), "lemma_t3bd"),
                    asym));
    return out;
  }

  if (q == "t4") {
    detail::need_group_lambda(in, q);
    const auto& h = detail::need_h(in, q);
    const u64 t3 = t_k(h, 3, opt);
    const u64 t4 = t_k(h, 4, opt);
    BoundInputs bi{p, std::nullopt, h.size(), std::nullopt, std::nullopt, std::nullopt};
    out.push_back(
        make_report("t4", bi, t4, fixed(detail::dsq(h.size()) * static_cast<double>(t3), "H^2*T3"), exact));
    return out;
  }

  if (q == "q") {
    const auto& h = detail::need_h(in, q);
    const u64 qq = q_rect(h);
    BoundInputs bi{p, std::nullopt, h.size(), std::nullopt, std::nullopt, std::nullopt};
    out.push_back(make_report("q", bi, qq, tagged(eval_t3_bounds(h.size(), 1, p, T3Bound::kQStar), "qstar"),
                              asym));
    return out;
  }

  if (q == "mk") {
    const auto& a = detail::need_a(in, q);
    const u64 k = k_opt.value_or(default_k(a.size()));
    const auto rc = rich_hyperbolae(a, k, in.lambda, RichMode::kPairs, nullptr, false, opt.workers,
                                    opt.budget);
    BoundInputs bi{p, a.size(), std::nullopt, std::nullopt, k, std::nullopt};
    const double na = static_cast<double>(a.size());
    out.push_back(make_report("mk", bi, rc.count, tagged(eval_mk_bb(a.size(), k, p), "bb"), asym));
    out.push_back(make_report("mk", bi, rc.count,
                              fixed(std::pow(na, 7) / std::pow(static_cast<double>(k), 5), "A^7/k^5"),
                              asym));
    return out;
  }

  if (q == "lk") {
    const auto& a = detail::need_a(in, q);
    const u64 k = k_opt.value_or(default_k(a.size()));
    const auto rl = rich_lines(a, a, k, true, true);
    BoundInputs bi{p, a.size(), std::nullopt, std::nullopt, k, std::nullopt};
    out.push_back(make_report("lk", bi, rl.count, tagged(eval_lines_lk(a.size(), k, p), "lk"), asym));
    const detail::Membership in_a(a);
    u64 incidences = 0;
    for (const Line& l : rl.witnesses) {
      for (const auto& x : a) {
        if (l.vertical) {
          if (x.value() == l.intercept) incidences += a.size();
        } else if (in_a.contains(in.m.add(in.m.mul(l.slope, x.value()), l.intercept))) {
          ++incidences;
        }
      }
    }
    BoundInputs li{p, a.size(), std::nullopt, std::nullopt, k, std::nullopt};
    out.push_back(make_report("lines", li, incidences,
                              eval_lines_sdz(a.size(), rl.count, p), asym));
    return out;
  }

  if (q == "eplus") {
    const auto& a = detail::need_a(in, q);
    BoundInputs bi{p, a.size(), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    out.push_back(make_report("eplus", bi, additive_energy(a),
                              fixed(std::pow(static_cast<double>(a.size()), 3), "A^3"), exact));
    return out;
  }

  if (q == "sumprod") {
    const auto& a = detail::need_a(in, q);
    BoundInputs bi{p, a.size(), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    if (!a.empty()) {
      const auto wider = std::max(sumset(a, a).size(), difference_set(a, a).size());
      bi.K = static_cast<double>(wider) / static_cast<double>(a.size());
    }
    const double bound = std::pow(static_cast<double>(a.size()), 2.9);
    for (int v = 1; v <= 4; ++v) {
      out.push_back(make_report("sumprod", bi, sumprod_quadruples(a, v),
                                fixed(bound, "variant" + std::to_string(v) + ":A^(29/10)"), asym));
    }
    return out;
  }

  if (q == "minkowski") {
    const auto& a = detail::need_a(in, q);
    const u64 mk = minkowski_realisations(a, in.lambda);
    const MinkowskiReformulation ref = minkowski_reformulation(a);
    const u64 rect = sigma_rect(ref.domain, ref.range, ref.translates, in.lambda, opt.workers);
    const u64 rotated = point_incidences(ref.rotated_points, ref.translates, in.lambda);
    BoundInputs bi{p, a.size(), ref.translates.size(), std::nullopt, std::nullopt, std::nullopt};
    out.push_back(make_report("minkowski", bi, mk, fixed(static_cast<double>(rect), "sigma_rect"), exact));
    out.push_back(
        make_report("minkowski", bi, mk, fixed(static_cast<double>(rotated), "rotated_points"), exact));
    if (!a.empty()) {
      const double kk =
          static_cast<double>(std::max(ref.domain.size(), ref.range.size())) / static_cast<double>(a.size());
      bi.K = kk;
      out.push_back(make_report("minkowski", bi, mk,
                                fixed(std::pow(kk, 1.2) * std::pow(static_cast<double>(a.size()), 2.9),
                                      "K^(6/5)A^(29/10)"),
                                asym));
    }
    return out;
  }

  if (q == "cschain") {
    detail::need_group_lambda(in, q);
    const auto& a = detail::need_a(in, q);
    const auto& h = detail::need_h(in, q);
    const CsChainReport cs = cs_chain_report(a, h, in.lambda, opt);
    BoundInputs bi{p, a.size(), h.size(), std::nullopt, std::nullopt, std::nullopt};
    out.push_back(make_report("cschain", bi, cs.lhs_sq,
                              fixed(static_cast<double>(cs.rhs_cs),
                                    "sigma^2<=A*sum(r*sigma_u);delta=" + cs.delta.to_string() +
                                        ";omega=" + std::to_string(cs.omega_size)),
                              exact));
    return out;
  }

  if (q == "borel") {
    detail::need_group_lambda(in, q);
    const auto& h = detail::need_h(in, q);
    const BorelCosetReport cosets = borel_coset_mass(h, opt);
    const BorelT3Report t3 = borel_t3_mass(h, opt);
    BoundInputs bi{p, std::nullopt, h.size(), std::nullopt, std::nullopt, std::nullopt};
    out.push_back(make_report("borel", bi, cosets.max_non_borel, fixed(detail::dsq(h.size()), "X_B<=H^2"),
                              exact));
    out.push_back(make_report("borel", bi, t3.borel, fixed(detail::dsq(h.size()) * detail::dsq(h.size()),
                                                           "Y_B<=H^4"),
                              exact));
    return out;
  }

  throw InvalidArgument("unknown quantity '" + q + "'");
}

inline CountOptions count_options(const ExperimentConfig& cfg) {
  CountOptions opt;
  opt.workers = cfg.workers;
  opt.budget = cfg.budget;
  return opt;
}

inline std::vector<BoundReport> cmd_compute(const ExperimentConfig& cfg, const std::string& quantity) {
  const Instance in = prepare(cfg);
  return compute_reports(in, quantity, cfg.k, count_options(cfg));
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct VerifyResult {
  std::string suite;
  u64 cases = 0;
  u64 failures = 0;
  std::vector<std::string> witnesses;  // one line per failed assertion

  bool passed() const noexcept { return failures == 0; }
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {
      "oracle-equivalence", "algebraic-identities", "lemma-t3",    "lemma-sh-cartesian",
      "borel",              "charsum",              "minkowski-rotation", "t4-chain",
      "cross-algorithm-mk"};
  return s;
}

namespace detail {

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

// Case i of a suite draws everything from this generator.
inline std::mt19937_64 case_rng(u64 seed, const std::string& suite, u64 i) {
  u64 s = splitmix64(seed);
  for (char c : suite) s = splitmix64(s ^ static_cast<unsigned char>(c));
  return std::mt19937_64(splitmix64(s ^ splitmix64(i)));
}

inline u64 draw(std::mt19937_64& rng, u64 lo, u64 hi) { return lo + uniform_below(rng, hi - lo + 1); }

class SuiteRun {
 public:
  SuiteRun(std::string suite, std::ostream& log) : log_(log) { res_.suite = std::move(suite); }

  void check(bool ok, const std::string& label, const std::string& detail) {
    if (ok) return;
    ++res_.failures;
    res_.witnesses.push_back(label + ": " + detail);
    case_ok_ = false;
  }

  void begin_case() { case_ok_ = true; }

  void end_case(const std::string& label, const std::string& summary) {
    ++res_.cases;
    log_ << res_.suite << ' ' << label << ' ' << (case_ok_ ? "ok" : "FAIL") << ' ' << summary << '\n';
  }

  void end_case_quietly() { ++res_.cases; }

  VerifyResult finish() {
    for (const auto& w : res_.witnesses) log_ << res_.suite << " witness " << w << '\n';
    log_ << res_.suite << ": " << res_.cases << " cases, " << res_.failures << " failures: "
         << (res_.passed() ? "PASS" : "FAIL") << '\n';
    return res_;
  }

 private:
  std::ostream& log_;
  VerifyResult res_;
  bool case_ok_ = true;
};

inline std::string eq_detail(const char* what, u64 x, u64 y) {
  return std::string(what) + " " + std::to_string(x) + " vs " + std::to_string(y);
}

inline std::string le_detail(const char* what, u64 x, const std::string& bound) {
  return std::string(what) + " " + std::to_string(x) + " > " + bound;
}

inline std::string instance_label(u64 i, u64 p) {
  return "case " + std::to_string(i) + " p=" + std::to_string(p);
}

inline std::vector<u64> suite_primes(const ExperimentConfig& cfg, std::vector<u64> defaults) {
  if (cfg.p) return {check_prime(*cfg.p).value()};
  return defaults;
}

inline ScalarSet draw_scalar(std::mt19937_64& rng, PrimeModulus m, u64 max_size, u64 min_size = 1) {
  const u64 n = draw(rng, min_size, std::min<u64>(max_size, m.value()));
  return random_scalar_set(m, n, rng());
}

inline TranslateSet draw_translates(std::mt19937_64& rng, PrimeModulus m, u64 max_size, u64 min_size = 1) {
  const u64 n = draw(rng, min_size, max_size);
  return random_translate_set(m, n, rng());
}

inline FieldElement draw_lambda(std::mt19937_64& rng, PrimeModulus m) {
  return FieldElement::from_residue(draw(rng, 1, m.value() - 1), m);
}

inline VerifyResult suite_oracle(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("oracle-equivalence", log);
  const auto primes = suite_primes(cfg, {61, 101});
  const u64 trials = cfg.trials.value_or(100);
  const CountOptions opt = count_options(cfg);
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "oracle-equivalence", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    const ScalarSet a = draw_scalar(rng, m, 12);
    const TranslateSet h = draw_translates(rng, m, 32);
    const TranslateSet h3 = draw_translates(rng, m, oracle::kT3MaxH);
    const FieldElement lambda = draw_lambda(rng, m);
    const std::string label = instance_label(i, m.value()) + " A=" + render(a) + " H=" + render(h) +
                              " lambda=" + std::to_string(lambda.value());
    run.begin_case();
    const u64 s = sigma(a, h, lambda, opt.workers), s0 = oracle::sigma_naive(a, h, lambda);
    const u64 e = t_k(h, 2, opt), e0 = oracle::energy_naive(h);
    const u64 qq = q_rect(h), q0 = oracle::q_naive(h);
    const u64 t = t_k(h3, 3, opt), t0 = oracle::t3_naive(h3);
    run.check(s == s0, label, eq_detail("sigma", s, s0));
    run.check(e == e0, label, eq_detail("energy", e, e0));
    run.check(qq == q0, label, eq_detail("q", qq, q0));
    run.check(t == t0, label + " H3=" + render(h3), eq_detail("t3", t, t0));
    run.end_case(instance_label(i, m.value()), "sigma=" + std::to_string(s) + " E=" + std::to_string(e) +
                                                   " Q=" + std::to_string(qq) + " T3=" + std::to_string(t));
  }
  return run.finish();
}

inline std::string render_translate(const Translate& t) {
  return "(" + std::to_string(t.a.value()) + "," + std::to_string(t.b.value()) + ")";
}

inline VerifyResult suite_algebraic(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("algebraic-identities", log);
  const auto primes = suite_primes(cfg, {61, 101, 499, 1009});
  const u64 trials = cfg.trials.value_or(100000);
  u64 quotient_mismatch = 0, triple_mismatch = 0;
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "algebraic-identities", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    auto pick = [&] {
      return Translate{FieldElement::from_residue(uniform_below(rng, m.value()), m),
                       FieldElement::from_residue(uniform_below(rng, m.value()), m)};
    };
    const Translate h1 = pick(), h2 = pick(), h3 = pick();
    const MoebiusMap generic_q = compose(embed_translate(h1), invert(embed_translate(h2)));
    const MoebiusMap generic_t = compose(generic_q, embed_translate(h3));
    const std::string label = instance_label(i, m.value()) + " h=" + render_translate(h1) +
                              render_translate(h2) + render_translate(h3);
    run.begin_case();
    if (!(pair_quotient(h1, h2) == generic_q)) {
      ++quotient_mismatch;
      run.check(false, label, "pair_quotient " + render(pair_quotient(h1, h2)) + " vs " + render(generic_q));
    }
    if (!(triple_product(h1, h2, h3) == generic_t)) {
      ++triple_mismatch;
      run.check(false, label,
                "triple_product " + render(triple_product(h1, h2, h3)) + " vs " + render(generic_t));
    }
    run.end_case_quietly();
  }
  log << "algebraic-identities random " << trials << " triples, quotient mismatches=" << quotient_mismatch
      << " triple mismatches=" << triple_mismatch << '\n';

  // Exhaustive over every odd prime up to 31: det(embed) = 1, and the action
  // of h1·h2 on P¹ equals h1 applied after h2, including at ∞.
  for (u64 p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    const PrimeModulus m = check_prime(static_cast<i64>(p));
    std::vector<Translate> all;
    for (u64 a = 0; a < p; ++a) {
      for (u64 b = 0; b < p; ++b) all.push_back({FieldElement::from_residue(a, m), FieldElement::from_residue(b, m)});
    }
    std::vector<ProjectiveValue> line;
    for (u64 x = 0; x < p; ++x) line.push_back(ProjectiveValue::finite(FieldElement::from_residue(x, m)));
    line.push_back(ProjectiveValue::infinity(m));
    run.begin_case();
    u64 det_bad = 0, action_bad = 0;
    const FieldElement one(1, m);
    for (const auto& h : all) {
      const MoebiusMap g = embed_translate(h);
      if (!(g.a() * g.d() - g.b() * g.c() == one)) {
        ++det_bad;
        run.check(false, "p=" + std::to_string(p) + " h=" + render_translate(h), "det(embed) != 1");
      }
    }
    std::vector<MoebiusMap> maps;
    for (const auto& h : all) maps.push_back(embed_translate(h));
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = 0; j < all.size(); ++j) {
        const MoebiusMap prod = compose(maps[i], maps[j]);
        for (const auto& x : line) {
          const ProjectiveValue lhs = evaluate(prod, x);
          const ProjectiveValue rhs = evaluate(maps[i], evaluate(maps[j], x));
          const ProjectiveValue viaTranslate =
              evaluate_translate(all[i], evaluate_translate(all[j], x, FieldElement(1, m)), FieldElement(1, m));
          if (!(lhs == rhs) || !(lhs == viaTranslate)) {
            ++action_bad;
            std::ostringstream os;
            os << "p=" << p << " h1=" << render_translate(all[i]) << " h2=" << render_translate(all[j])
               << " x=" << x;
            run.check(false, os.str(), "action homomorphism");
          }
        }
      }
    }
    run.end_case("exhaustive p=" + std::to_string(p),
                 "det failures=" + std::to_string(det_bad) + " action failures=" + std::to_string(action_bad));
  }
  return run.finish();
}

// T3(H) <= 2|H|Q(H) + 2|H|⁴ on random H and on Cartesian B×B. The borel
// suite reuses the same corpus.
struct T3Corpus {
  std::vector<TranslateSet> sets;
  std::vector<std::string> labels;
};

inline T3Corpus t3_corpus(const ExperimentConfig& cfg, const std::string& suite) {
  const auto primes = suite_primes(cfg, {101, 499});
  const u64 random_trials = cfg.trials.value_or(200);
  const u64 cartesian_trials = cfg.trials ? std::min<u64>(*cfg.trials, 50) : 50;
  T3Corpus out;
  for (u64 i = 0; i < random_trials; ++i) {
    auto rng = case_rng(cfg.seed, suite, i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    out.sets.push_back(draw_translates(rng, m, 24));
    out.labels.push_back(instance_label(i, m.value()) + " H=" + render(out.sets.back()));
  }
  for (u64 i = 0; i < cartesian_trials; ++i) {
    auto rng = case_rng(cfg.seed, suite + "/cartesian", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    const ScalarSet b = draw_scalar(rng, m, 5);
    out.sets.push_back(gen_cartesian(b, b));
    out.labels.push_back("cartesian " + instance_label(i, m.value()) + " B=" + render(b));
  }
  return out;
}

inline VerifyResult suite_lemma_t3(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("lemma-t3", log);
  const CountOptions opt = count_options(cfg);
  const T3Corpus corpus = t3_corpus(cfg, "lemma-t3");
  for (std::size_t i = 0; i < corpus.sets.size(); ++i) {
    const TranslateSet& h = corpus.sets[i];
    const u64 t3 = t_k(h, 3, opt);
    const u64 qq = q_rect(h);
    const u128 n = h.size();
    const u128 bound = 2 * n * qq + 2 * n * n * n * n;
    run.begin_case();
    run.check(t3 <= bound, corpus.labels[i], le_detail("T3", t3, Rational::u128_to_string(bound)));
    run.end_case("case " + std::to_string(i), "|H|=" + std::to_string(h.size()) + " T3=" +
                                                  std::to_string(t3) + " bound=" + Rational::u128_to_string(bound));
  }
  return run.finish();
}

inline VerifyResult suite_borel(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("borel", log);
  const CountOptions opt = count_options(cfg);
  const T3Corpus corpus = t3_corpus(cfg, "lemma-t3");
  for (std::size_t i = 0; i < corpus.sets.size(); ++i) {
    const TranslateSet& h = corpus.sets[i];
    const u128 n = h.size();
    const BorelCosetReport cosets = borel_coset_mass(h, opt);
    const BorelT3Report t3 = borel_t3_mass(h, opt);
    const u64 e = t_k(h, 2, opt);
    u128 summed = cosets.borel_mass;
    for (const auto& [label, mass] : cosets.non_borel) summed += mass;
    run.begin_case();
    run.check(cosets.max_non_borel <= n * n, corpus.labels[i],
              le_detail("max non-Borel coset mass", cosets.max_non_borel, Rational::u128_to_string(n * n)));
    run.check(t3.borel <= n * n * n * n, corpus.labels[i],
              le_detail("Borel T3 mass", t3.borel, Rational::u128_to_string(n * n * n * n)));
    run.check(summed == e, corpus.labels[i], eq_detail("coset mass sum vs E", static_cast<u64>(summed), e));
    run.end_case("case " + std::to_string(i), "X_B=" + std::to_string(cosets.max_non_borel) +
                                                  " Y_B=" + std::to_string(t3.borel) + " E=" + std::to_string(e));
  }
  return run.finish();
}

inline VerifyResult suite_lemma_sh(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("lemma-sh-cartesian", log);
  const auto primes = suite_primes(cfg, {61, 101, 499, 1009});
  const u64 trials = cfg.trials.value_or(100);
  const CountOptions opt = count_options(cfg);
  u64 energy_fail = 0, t3_fail = 0;
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "lemma-sh-cartesian", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    const ScalarSet b = draw_scalar(rng, m, 8);
    const TranslateSet h = gen_cartesian(b, b);
    const u128 n = b.size();
    const u64 e = t_k(h, 2, opt);
    const u64 t3 = t_k(h, 3, opt);
    const u128 e_bound = n * n * additive_energy(b);
    const u128 t3_bound = n * n * product_rep_energy(b) + n * n * n * n * n * n * n * n;
    const std::string label = instance_label(i, m.value()) + " B=" + render(b);
    run.begin_case();
    if (e > e_bound) ++energy_fail;
    if (t3 > t3_bound) ++t3_fail;
    run.check(e <= e_bound, label, le_detail("E(BxB)", e, Rational::u128_to_string(e_bound)));
    run.check(t3 <= t3_bound, label, le_detail("T3(BxB)", t3, Rational::u128_to_string(t3_bound)));
    run.end_case(instance_label(i, m.value()), "|B|=" + std::to_string(b.size()) + " E=" + std::to_string(e) +
                                                   " |B|^2E+=" + Rational::u128_to_string(e_bound) +
                                                   " T3=" + std::to_string(t3));
  }
  log << "lemma-sh-cartesian energy violations=" << energy_fail << " t3 violations=" << t3_fail << '\n';
  return run.finish();
}

inline VerifyResult suite_charsum(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("charsum", log);
  const auto primes = suite_primes(cfg, {101, 499, 1009});
  const u64 trials = cfg.trials.value_or(200);
  const CountOptions opt = count_options(cfg);
  double worst = 0.0;
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "charsum", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    // Every fourth case takes |A| from the top of the range, up to p - 1.
    const u64 top = m.value() - 1;
    const ScalarSet a = (i % 4 == 3) ? draw_scalar(rng, m, top, top - std::min<u64>(top - 1, 8))
                                     : draw_scalar(rng, m, top);
    const TranslateSet h = draw_translates(rng, m, 256);
    const u64 s = sigma(a, h, default_lambda(m), opt.workers);
    const BoundReport r = make_report("charsum", {m.value(), a.size(), h.size(), std::nullopt, std::nullopt,
                                                  std::nullopt},
                                      s, eval_charsum(a.size(), h.size(), m.value()), Exactness::kExactConstant);
    worst = std::max(worst, r.ratio);
    run.begin_case();
    run.check(!r.failed(), instance_label(i, m.value()) + " seed-derived |A|=" + std::to_string(a.size()) +
                               " H=" + render(h),
              le_detail("sigma", s, format_real(r.bound)));
    run.end_case(instance_label(i, m.value()), "|A|=" + std::to_string(a.size()) + " |H|=" +
                                                   std::to_string(h.size()) + " sigma=" + std::to_string(s) +
                                                   " ratio=" + format_real(r.ratio));
  }
  log << "charsum max ratio " << format_real(worst) << '\n';
  return run.finish();
}

inline VerifyResult suite_minkowski(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("minkowski-rotation", log);
  const auto primes = suite_primes(cfg, {101, 499});
  const u64 trials = cfg.trials.value_or(50);
  u64 rotated_agree = 0;
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "minkowski-rotation", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    const ScalarSet a = draw_scalar(rng, m, 10);
    const FieldElement lambda = draw_lambda(rng, m);
    const u64 direct = minkowski_realisations(a, lambda);
    const MinkowskiReformulation ref = minkowski_reformulation(a);
    const u64 rect = sigma_rect(ref.domain, ref.range, ref.translates, lambda, cfg.workers);
    const u64 rotated = point_incidences(ref.rotated_points, ref.translates, lambda);
    if (rotated == direct) ++rotated_agree;
    run.begin_case();
    run.check(direct == rect,
              instance_label(i, m.value()) + " A=" + render(a) + " lambda=" + std::to_string(lambda.value()),
              eq_detail("minkowski vs sigma_rect(A+A, A-A)", direct, rect));
    run.end_case(instance_label(i, m.value()), "minkowski=" + std::to_string(direct) + " sigma_rect=" +
                                                   std::to_string(rect) + " rotated=" + std::to_string(rotated));
  }
  log << "minkowski-rotation rotated-point count agreed on " << rotated_agree << "/" << trials << " cases\n";
  return run.finish();
}

inline VerifyResult suite_t4(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("t4-chain", log);
  const auto primes = suite_primes(cfg, {61, 101, 499, 1009});
  const u64 trials = cfg.trials.value_or(50);
  const CountOptions opt = count_options(cfg);
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "t4-chain", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    const TranslateSet h = draw_translates(rng, m, 16);
    const u64 t3 = t_k(h, 3, opt);
    const u64 t4 = t_k(h, 4, opt);
    const u128 bound = static_cast<u128>(h.size()) * h.size() * t3;
    run.begin_case();
    run.check(t4 <= bound, instance_label(i, m.value()) + " H=" + render(h),
              le_detail("T4", t4, Rational::u128_to_string(bound)));
    run.end_case(instance_label(i, m.value()),
                 "|H|=" + std::to_string(h.size()) + " T3=" + std::to_string(t3) + " T4=" + std::to_string(t4));
  }
  return run.finish();
}

inline VerifyResult suite_cross_mk(const ExperimentConfig& cfg, std::ostream& log) {
  SuiteRun run("cross-algorithm-mk", log);
  const auto primes = suite_primes(cfg, {31, 61});
  const u64 trials = cfg.trials.value_or(20);
  for (u64 i = 0; i < trials; ++i) {
    auto rng = case_rng(cfg.seed, "cross-algorithm-mk", i);
    const PrimeModulus m = check_prime(static_cast<i64>(primes[i % primes.size()]));
    const ScalarSet a = draw_scalar(rng, m, 8, 2);
    const FieldElement lambda = draw_lambda(rng, m);
    const std::string label =
        instance_label(i, m.value()) + " A=" + render(a) + " lambda=" + std::to_string(lambda.value());
    run.begin_case();
    std::string counts;
    for (u64 k = 2; k <= a.size(); ++k) {
      const auto pairs = rich_hyperbolae(a, k, lambda, RichMode::kPairs, nullptr, true, cfg.workers, cfg.budget);
      const auto scan = rich_hyperbolae(a, k, lambda, RichMode::kExhaustive, nullptr, true, 1, cfg.budget);
      const auto naive = oracle::mk_exhaustive(a, k, lambda);
      run.check(pairs.count == scan.count && pairs.witnesses == scan.witnesses, label + " k=" + std::to_string(k),
                eq_detail("pairs vs exhaustive", pairs.count, scan.count));
      run.check(pairs.count == naive.count && pairs.witnesses == naive.witnesses,
                label + " k=" + std::to_string(k), eq_detail("pairs vs oracle scan", pairs.count, naive.count));
      counts += (counts.empty() ? "" : ",") + std::to_string(pairs.count);
    }
    run.end_case(instance_label(i, m.value()), "|A|=" + std::to_string(a.size()) + " m_k(k>=2)=" + counts);
  }
  return run.finish();
}

}  // namespace detail

inline VerifyResult cmd_verify(const ExperimentConfig& cfg, const std::string& suite, std::ostream& log) {
  if (cfg.workers < 1) throw InvalidArgument("--workers must be >= 1");
  if (cfg.p) check_prime(*cfg.p);
  if (suite == "oracle-equivalence") return detail::suite_oracle(cfg, log);
  if (suite == "algebraic-identities") return detail::suite_algebraic(cfg, log);
  if (suite == "lemma-t3") return detail::suite_lemma_t3(cfg, log);
  if (suite == "lemma-sh-cartesian") return detail::suite_lemma_sh(cfg, log);
  if (suite == "borel") return detail::suite_borel(cfg, log);
  if (suite == "charsum") return detail::suite_charsum(cfg, log);
  if (suite == "minkowski-rotation") return detail::suite_minkowski(cfg, log);
  if (suite == "t4-chain") return detail::suite_t4(cfg, log);
  if (suite == "cross-algorithm-mk") return detail::suite_cross_mk(cfg, log);
  throw InvalidArgument("unknown suite '" + suite + "'");
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

/// One instance of a scan family: a prime and the two set specs.
struct ScanInstance {
  i64 p = 0;
  std::string a_spec;
  std::string h_spec;
};

/// One output row: a report, or the error that stopped its instance.
struct ScanRow {
  BoundReport report;
  std::string error;  // empty on success

  bool ok() const noexcept { return error.empty(); }
};

inline constexpr i64 kDefaultScanPrime = 1009;

namespace detail {

inline std::vector<u64> parse_size_list(std::string_view body, const std::string& family) {
  std::vector<u64> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t comma = std::min(body.find(',', pos), body.size());
    const std::string_view tok = body.substr(pos, comma - pos);
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0) {
      throw InvalidArgument("bad size '" + std::string(tok) + "' in family '" + family + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace detail

/// Expands a family spec into instances:
///   ap:n1,n2,...      A = {1..n}, H = A×A
///   random:n1,n2,...  A random of size n, H random of size 2n (seeded from --seed and the row)
///   file:path         lines "p|a_spec|h_spec"; blank lines and '#' comments skipped
/// An empty spec, or a generator with no sizes, is an empty family.
inline std::vector<ScanInstance> expand_family(const ExperimentConfig& cfg) {
  const std::string& f = cfg.family;
  std::vector<ScanInstance> out;
  if (detail::trim(f).empty()) return out;
  const i64 p = cfg.p.value_or(kDefaultScanPrime);
  if (f.rfind("ap:", 0) == 0) {
    for (u64 n : detail::parse_size_list(std::string_view(f).substr(3), f)) {
      const std::string a = "ap:1,1," + std::to_string(n);
      out.push_back({p, a, "cart:" + a + ";" + a});
    }
    return out;
  }
  if (f.rfind("random:", 0) == 0) {
    u64 row = 0;
    for (u64 n : detail::parse_size_list(std::string_view(f).substr(7), f)) {
      const u64 sa = detail::splitmix64(cfg.seed ^ detail::splitmix64(2 * row));
      const u64 sh = detail::splitmix64(cfg.seed ^ detail::splitmix64(2 * row + 1));
      out.push_back({p, "random:" + std::to_string(n) + "," + std::to_string(sa % (u64{1} << 62U)),
                     "randomh:" + std::to_string(2 * n) + "," + std::to_string(sh % (u64{1} << 62U))});
      ++row;
    }
    return out;
  }
  if (f.rfind("file:", 0) == 0) {
    const std::string path = f.substr(5);
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open family file");
    std::string line;
    u64 line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string body = detail::trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto bar1 = body.find('|');
      const auto bar2 = bar1 == std::string::npos ? std::string::npos : body.find('|', bar1 + 1);
      if (bar2 == std::string::npos) {
        throw InvalidArgument(path + " line " + std::to_string(line_no) + ": expected p|a_spec|h_spec");
      }
      const std::string ps = detail::trim(std::string_view(body).substr(0, bar1));
      i64 pv = 0;
      auto [ptr, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), pv);
      if (ec != std::errc() || ptr != ps.data() + ps.size()) {
        throw InvalidArgument(path + " line " + std::to_string(line_no) + ": bad prime '" + ps + "'");
      }
      out.push_back({pv, detail::trim(std::string_view(body).substr(bar1 + 1, bar2 - bar1 - 1)),
                     detail::trim(std::string_view(body).substr(bar2 + 1))});
    }
    return out;
  }
  throw InvalidArgument("unknown family '" + f + "' (expected ap:, random: or file:)");
}

/// Comma-separated quantity list; defaults to "mk,sigma".
inline std::vector<std::string> scan_quantities(const std::string& spec) {
  std::vector<std::string> out;
  const std::string s = spec.empty() ? "mk,sigma" : spec;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string q = detail::trim(std::string_view(s).substr(pos, comma - pos));
    if (std::find(compute_quantities().begin(), compute_quantities().end(), q) == compute_quantities().end()) {
      throw InvalidArgument("unknown quantity '" + q + "'");
    }
    out.push_back(q);
    pos = comma + 1;
  }
  return out;
}

/// Runs every quantity on every instance. A failing instance yields one error
/// row per quantity and the scan moves on.
inline std::vector<ScanRow> cmd_scan(const ExperimentConfig& cfg) {
  if (cfg.workers < 1) throw InvalidArgument("--workers must be >= 1");
  const auto quantities = scan_quantities(cfg.quantity);
  const auto family = expand_family(cfg);
  const CountOptions opt = count_options(cfg);
  std::vector<ScanRow> rows;
  for (const auto& inst : family) {
    for (const auto& q : quantities) {
      try {
        const Instance in = make_instance(check_prime(inst.p), cfg.lambda, inst.a_spec, inst.h_spec);
        for (auto& r : compute_reports(in, q, cfg.k, opt)) rows.push_back({std::move(r), {}});
      } catch (const Error& e) {
        ScanRow row;
        row.report.quantity = q;
        row.report.inputs.p = inst.p > 0 ? static_cast<u64>(inst.p) : 0;
        row.error = e.what();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

/// Scan output: the report schema, with empty numeric fields and
/// regime "error: ..." on rows whose instance failed.
inline void emit_scan(const std::vector<ScanRow>& rows, ReportFormat format, std::ostream& os) {
  if (format == ReportFormat::kCsv) {
    os << kCsvHeader << '\n';
    for (const auto& row : rows) {
      if (row.ok()) {
        os << csv_row(row.report) << '\n';
      } else {
        os << detail::csv_field(row.report.quantity) << ',' << row.report.inputs.p << ",,,,,,,,"
           << detail::csv_field("error: " + row.error) << ",\n";
      }
    }
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    if (row.ok()) {
      arr.push_back(to_json(row.report));
    } else {
      arr.push_back({{"quantity", row.report.quantity},
                     {"inputs", {{"p", row.report.inputs.p}}},
                     {"error", row.error}});
    }
  }
  os << arr.dump(2) << '\n';
}

}  // namespace hyperlab

// Lists the k-rich translates of xy = -1 for an arithmetic progression and
// compares the count with min(|A|^7/k^5, p|A|^4/k^3).

#include <iostream>

#include "hyperlab/hyperlab.hpp"

int main(int argc, char** argv) {
  using namespace hyperlab;
  const i64 p = argc > 1 ? std::stoll(argv[1]) : 61;
  const u64 n = argc > 2 ? std::stoull(argv[2]) : 10;
  const PrimeModulus m = check_prime(p);
  const ScalarSet a = parse_scalar_spec("ap:1,1," + std::to_string(n), m);

  for (u64 k = 2; k <= a.size(); ++k) {
    const auto r = rich_hyperbolae(a, k, default_lambda(m), RichMode::kPairs, nullptr, true);
    const Evaluation bb = eval_mk_bb(a.size(), k, m.value());
    std::cout << "k=" << k << " m_k=" << r.count << " bound=" << format_real(bb.value) << " (" << bb.regime
              << (bb.applicable ? "" : ", k <= sqrt|A|") << ")";
    if (!r.witnesses.empty() && r.witnesses.size() <= 4) {
      std::cout << " witnesses:";
      for (const auto& t : r.witnesses) std::cout << " (" << t.a.value() << "," << t.b.value() << ")";
    }
    std::cout << '\n';
    if (r.count == 0) break;
  }
}

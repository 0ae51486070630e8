// Counts incidences between A×A and a few hyperbola translates over F_101,
// then prints the bound reports as CSV.

#include <iostream>

#include "hyperlab/hyperlab.hpp"

int main() {
  using namespace hyperlab;
  const PrimeModulus m = check_prime(101);
  const ScalarSet a = parse_scalar_spec("ap:1,1,12", m);
  const TranslateSet h = parse_translate_spec("randomh:40,7", m);

  std::cout << "sigma(A, H) = " << sigma(a, h) << '\n';
  std::cout << "E(H) = " << t_k(h, 2) << ", T3(H) = " << t_k(h, 3) << ", Q(H) = " << q_rect(h) << "\n\n";

  const Instance in = make_instance(m, -1, "ap:1,1,12", "randomh:40,7");
  std::vector<BoundReport> reports;
  for (const char* q : {"sigma", "t3", "borel"}) {
    for (auto& r : compute_reports(in, q, std::nullopt, CountOptions{})) reports.push_back(std::move(r));
  }
  emit(reports, ReportFormat::kCsv, std::cout);
}

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hyperlab/hyperlab.hpp"

namespace {

// 0 success, 1 assertion failed, 2 bad input, 3 resource limit, 4 I/O error.
enum Exit { kOk = 0, kAssertion = 1, kBadInput = 2, kResource = 3, kIo = 4 };

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw hyperlab::IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw hyperlab::IoError(path, "write failed");
}

void add_common(CLI::App* cmd, hyperlab::ExperimentConfig& cfg, std::string& format) {
  cmd->add_option("--p", cfg.p, "odd prime modulus");
  cmd->add_option("--lambda", cfg.lambda, "hyperbola constant, default -1");
  cmd->add_option("--A", cfg.a_spec, "scalar set spec");
  cmd->add_option("--H", cfg.h_spec, "translate set spec");
  cmd->add_option("--B", cfg.b_spec, "scalar set spec; with --C and no --H, H = B x C");
  cmd->add_option("--C", cfg.c_spec, "scalar set spec");
  cmd->add_option("--k", cfg.k, "richness threshold");
  cmd->add_option("--seed", cfg.seed, "corpus seed");
  cmd->add_option("--trials", cfg.trials, "cases per suite");
  cmd->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--budget-t3", cfg.budget.max_h_t3, "largest |H| for T3 enumeration");
  cmd->add_option("--out", cfg.out, "output file, default stdout");
  cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperlab: exact incidence and energy counts for hyperbola translates over F_p"};
  app.require_subcommand(1);

  hyperlab::ExperimentConfig cfg;
  std::string format = "csv";
  std::string quantity, suite;

  auto* compute = app.add_subcommand("compute", "compute one quantity and its bounds");
  compute->add_option("quantity_name", quantity, "quantity")->check(CLI::IsMember(hyperlab::compute_quantities()));
  compute->add_option("--quantity", quantity, "quantity")->check(CLI::IsMember(hyperlab::compute_quantities()));
  add_common(compute, cfg, format);

  auto* verify = app.add_subcommand("verify", "run a seeded verification suite");
  verify->add_option("suite_name", suite, "suite")->check(CLI::IsMember(hyperlab::verify_suites()));
  verify->add_option("--suite", suite, "suite")->check(CLI::IsMember(hyperlab::verify_suites()));
  add_common(verify, cfg, format);

  auto* scan = app.add_subcommand("scan", "run quantities over a family of instances");
  scan->add_option("--family", cfg.family, "ap:n1,n2,... | random:n1,n2,... | file:path");
  scan->add_option("--quantity", cfg.quantity, "comma-separated quantities, default mk,sigma");
  add_common(scan, cfg, format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    const auto env = hyperlab::Budget::from_env();
    cfg.budget.table_mb = env.table_mb;
    cfg.format = hyperlab::parse_format(format);

    if (compute->parsed()) {
      if (quantity.empty()) throw hyperlab::InvalidArgument("compute needs a quantity");
      const auto reports = hyperlab::cmd_compute(cfg, quantity);
      write_output(hyperlab::emit_string(reports, cfg.format), cfg.out);
      for (const auto& r : reports) {
        if (r.failed()) {
          std::cerr << "exact-constant bound violated: " << hyperlab::csv_row(r) << '\n';
          return kAssertion;
        }
      }
      return kOk;
    }

    if (verify->parsed()) {
      if (suite.empty()) throw hyperlab::InvalidArgument("verify needs a suite");
      std::ostringstream log;
      const auto result = hyperlab::cmd_verify(cfg, suite, log);
      write_output(log.str(), cfg.out);
      if (!cfg.out.empty()) std::cout << log.str();
      return result.passed() ? kOk : kAssertion;
    }

    const auto rows = hyperlab::cmd_scan(cfg);
    std::ostringstream os;
    hyperlab::emit_scan(rows, cfg.format, os);
    write_output(os.str(), cfg.out);
    int rc = kOk;
    for (const auto& row : rows) {
      if (!row.ok()) {
        std::cerr << "row failed: " << row.report.quantity << " p=" << row.report.inputs.p << ": " << row.error
                  << '\n';
        rc = kAssertion;
      } else if (row.report.failed()) {
        std::cerr << "exact-constant bound violated: " << hyperlab::csv_row(row.report) << '\n';
        rc = kAssertion;
      }
    }
    return rc;
  } catch (const hyperlab::ResourceLimit& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResource;
  } catch (const hyperlab::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const hyperlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
}

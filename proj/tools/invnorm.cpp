// Command-line front end: certify, table, selftest.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "invnorm/certify.hpp"
#include "invnorm/config.hpp"
#include "invnorm/problems.hpp"
#include "invnorm/selftest.hpp"

namespace fs = std::filesystem;
using namespace invnorm;

namespace {

int cmd_certify(const std::string& config_path, std::string out, std::string grid_out, std::string solution_out,
                int threads) {
  RunConfig cfg = load_config(config_path);
  if (out.empty()) out = cfg.certificate_out;
  if (grid_out.empty()) grid_out = cfg.grid_out;
  if (solution_out.empty()) solution_out = cfg.solution_out;
  if (out.empty()) throw ConfigError("no certificate output path (--out or run.certificate)");
  set_threads(threads > 0 ? threads : cfg.threads);
  const ProblemSpec problem = make_problem(cfg);
  if (!cfg.solution_in.empty()) cfg.pipeline.solution = load_solution(cfg.solution_in);
  const PipelineResult res = run_pipeline(problem, cfg.pipeline);
  const Certificate& c = res.certificate;
  save_certificate(c, out);
  if (res.solution.u.m() > 0) {
    if (!solution_out.empty()) save_solution(res.solution.u, solution_out);
    if (!grid_out.empty()) dump_grid(res.solution.u, grid_out);
  }
  std::cout << "problem " << c.problem << " N_cert=" << c.n_cert << " status " << c.status;
  if (c.gap) std::cout << " gap j=" << c.gap->j_cluster << " nu=" << c.gap->nu.hi();
  if (c.lambda_lower) std::cout << " lambda_lower=" << c.lambda_lower->lo();
  if (c.inv_norm_upper) std::cout << " inv_norm<=" << c.inv_norm_upper->hi();
  std::cout << " (" << c.guarantee << ")\n";
  return exit_code(c);
}

int cmd_table(int which, const std::string& runs, const std::string& out) {
  if (!fs::is_directory(runs)) throw std::runtime_error("run directory " + runs + " does not exist");
  std::vector<Certificate> certs;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(runs))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) certs.push_back(load_certificate(f.string()));
  if (certs.empty()) throw std::runtime_error("no certificates in " + runs);
  const std::string csv = which == 1 ? table1_csv(certs) : table2_csv(certs);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << csv;
  }
  return 0;
}

int cmd_selftest(bool corrupt) {
  bool ok = true;
  for (const CheckResult& r : run_selftest(corrupt)) {
    std::cout << format(r) << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified bounds for inverse norms of perturbed Laplace operators"};
  app.require_subcommand(0, 1);
  int threads = 0;
  bool dump = false;
  app.add_option("--threads", threads, "BLAS/LAPACK threads (overrides run.threads)")->check(CLI::PositiveNumber);
  app.add_flag("--dump-defaults", dump, "Print the default configuration and exit");

  auto* certify = app.add_subcommand("certify", "Run the certification pipeline");
  std::string config, out, grid_out, solution_out;
  certify->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  certify->add_option("--out", out, "Certificate JSON output (overrides run.certificate)");
  certify->add_option("--grid-out", grid_out, "Gnuplot grid of the approximate solution");
  certify->add_option("--solution-out", solution_out, "Approximate solution JSON");

  auto* table = app.add_subcommand("table", "Tabulate certificates as CSV");
  int which = 1;
  std::string runs = ".", table_out;
  table->add_option("--which", which, "Table layout")->required()->check(CLI::IsMember({1, 2}));
  table->add_option("--runs", runs, "Directory with certificate JSON files");
  table->add_option("--out", table_out, "CSV output (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "Run the oracle suite");
  bool corrupt = false;
  selftest->add_flag("--corrupt-gram", corrupt, "Damage the Gram assembly to exercise failure reporting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (dump) {
    std::cout << dump_defaults();
    return 0;
  }
  try {
    if (threads > 0) set_threads(threads);
    if (*certify) return cmd_certify(config, out, grid_out, solution_out, threads);
    if (*table) return cmd_table(which, runs, table_out);
    if (*selftest) return cmd_selftest(corrupt);
    std::cout << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#pragma once

#include <string>
#include <vector>

namespace invnorm {

struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Printed constants of the reference Lotka-Volterra runs.
struct ReferenceRow {
  int n;
  double C_h;
  double C_Ms;
  double lambda_lo, lambda_hi;
  double liu_lower;
};
const std::vector<ReferenceRow>& reference_rows();
// C_p, sigma, ||sigma - (Q+Q*)||, ||Q|| shared by the reference rows.
struct ReferenceNorms {
  double norm_QQstar;
  double sigma_margin;
  double norm_shift;
  double norm_Q;
};
ReferenceNorms reference_norms();

// Individual criteria. Tolerances are fixed inside each check.
CheckResult check_formula_reproduction();
CheckResult check_final_bound();
CheckResult check_interval_oracle_1d(bool corrupt_gram = false);
CheckResult check_zero_perturbation_2d(bool corrupt_gram = false);
CheckResult check_gram_stage(bool corrupt_gram = false);
CheckResult check_quick_properties();

// Oracle suite of the selftest command.
std::vector<CheckResult> run_selftest(bool corrupt_gram = false);

// "PASS id name (detail)" or "FAIL ...".
std::string format(const CheckResult& r);

}  // namespace invnorm

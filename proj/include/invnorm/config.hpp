#pragma once

#include <stdexcept>
#include <string>

#include "invnorm/certify.hpp"
#include "invnorm/problems.hpp"

namespace invnorm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsed run configuration (INI format, see dump_defaults()).
struct RunConfig {
  std::string problem = "lotka-volterra";  // lotka-volterra | constant-q | custom
  double c = 0.0;                          // constant-q
  int dim = 2;                             // constant-q
  int m = 1;                               // constant-q
  std::string coefficients;                // custom: coefficient file
  std::string solution_in;                 // pinned approximate solution
  PipelineOptions pipeline;
  int threads = 1;
  std::string certificate_out;
  std::string solution_out;
  std::string grid_out;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_defaults();

ProblemSpec make_problem(const RunConfig& cfg);

// Coefficient file (JSON): {"dim": d, "m": m, "entries": [[entry, ...], ...]}
// with entry = {"constant": c, "psi": {"n": n, "coeffs": [...]},
//               "legendre": {"n": n, "coeffs": [...]}} (psi and legendre optional).
CoefficientMatrix load_coefficients(const std::string& path);

}  // namespace invnorm

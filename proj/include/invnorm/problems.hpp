#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invnorm/assembly.hpp"
#include "invnorm/coefficients.hpp"

namespace invnorm {

struct ProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -Delta u = f(u) on (0,1)^dim with homogeneous Dirichlet data.
struct ProblemSpec {
  std::string name;
  std::string descriptor;  // parameters in text form, part of the certificate hash
  int dim = 2;
  int m = 1;
  // Pointwise nonlinearity on grid values (rule gives the nodes per axis).
  std::function<GridVectorField(const GridVectorField& u, const QuadratureRule& rule)> f;
  // Frechet derivative coefficients q = f'(u).
  std::function<CoefficientMatrix(const VectorField& u)> jacobian;
  int f_degree = 1;  // polynomial degree of f in u
  int x_degree = 0;  // extra polynomial degree of f in x
  // Set when q does not depend on u; certification then needs no solve.
  std::optional<CoefficientMatrix> fixed_q;
};

ProblemSpec lotka_volterra();
ProblemSpec constant_q(double c, int dim, int m);
ProblemSpec custom_coefficients(CoefficientMatrix q, const std::string& descriptor);
// f(u) = -Delta u_star independent of u (manufactured solution u_star).
ProblemSpec manufactured(const VectorField& u_star);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 40;
  double damping = 1.0;
  int coarse_n = 10;
  std::vector<double> amplitudes{2, 6, 12, -2, -6, -12};
};

struct NewtonStep {
  int iteration = 0;
  double residual = 0.0;
  double step_length = 0.0;
};

struct ApproxSolution {
  VectorField u;
  double residual = 0.0;
  bool converged = false;
  std::string start;
  std::vector<NewtonStep> log;
  std::vector<std::string> branches;  // distinct converged solutions seen in a multi-start
};

// Galerkin residual F(c) = D c - load(f(u)) for a solution candidate.
Eigen::VectorXd galerkin_residual(const ProblemSpec& p, const GramMatrices& gram, const VectorField& u);

// Damped Newton with Jacobian D - Qmat(q(u)); throws on a singular Jacobian.
ApproxSolution newton_solve(const ProblemSpec& p, int n_solve, const VectorField& init, const NewtonOptions& opt);

// Default start alpha * 16 x(1-x) y(1-y) (2D) or alpha * 4 x(1-x) (1D) per component.
VectorField default_start(int dim, int n, const std::vector<double>& alpha);

// Multi-start at the coarse size, selection, prolongation and polish at n_solve.
ApproxSolution solve_multistart(const ProblemSpec& p, int n_solve, const NewtonOptions& opt);

double interior_mean(const VectorField& u);

// Solution files.
void save_solution(const VectorField& u, const std::string& path);
VectorField load_solution(const std::string& path);
// Gnuplot grid "x y u_1 ... u_m" with blank lines between x rows.
void dump_grid(const VectorField& u, const std::string& path, int points = 101);

}  // namespace invnorm

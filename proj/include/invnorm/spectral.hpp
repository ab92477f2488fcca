#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace invnorm {

struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Tensor Legendre discretization on (0,1)^dim with m components and n basis
// functions psi_1..psi_n per direction. quad_order = 0 means "pick per integral".
struct BasisSpec {
  int dim = 1;
  int m = 1;
  int n = 1;
  int quad_order = 0;

  int local_size() const { return dim == 1 ? n : n * n; }
  int size() const { return m * local_size(); }
  void validate() const;
  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre rule with n points on (0,1).
QuadratureRule gauss_rule(int n);

// Points per dimension for exact integration of a polynomial of the given
// degree per variable, with a margin of one point.
int quad_points_for_degree(int degree);

// Shifted Legendre polynomial P_i on [0,1] with P_i(1) = 1.
double legendre_eval(int i, double x);
// d/dx of the shifted Legendre polynomial.
double legendre_deriv(int i, double x);
// Fills P[0..nmax] and dP[0..nmax] (d/dx) at x; dP may be null.
void legendre_all(int nmax, double x, double* P, double* dP);

// psi_i(x) = x(1-x) P_i'(x) / (i(i+1)), i >= 1.
double psi_eval(int i, double x);
double psi_deriv(int i, double x);
double psi_second(int i, double x);

struct Gram1D {
  Eigen::MatrixXd S;  // int psi_i' psi_j'
  Eigen::MatrixXd M;  // int psi_i psi_j
};

Gram1D gram_1d(int n);

// Polynomial in the psi basis. Coefficient index is i1 + n*i2 (0-based,
// i1 along x) in 2D and i1 in 1D.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int dim, int n);
  ScalarField(int dim, int n, Eigen::VectorXd coeffs);

  int dim() const { return dim_; }
  int n() const { return n_; }
  // Polynomial degree per variable.
  int degree() const { return n_ + 1; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  double coeff(int i1, int i2 = 0) const { return coeffs_[i1 + n_ * i2]; }

  double value(double x, double y = 0.0) const;
  // Zero padding or truncation to a different basis count.
  ScalarField resized(int n_new) const;

 private:
  int dim_ = 1;
  int n_ = 0;
  Eigen::VectorXd coeffs_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<ScalarField> components);
  // Splits a stacked coefficient vector of length spec.size().
  static VectorField from_stacked(const BasisSpec& spec, const Eigen::VectorXd& x);
  static VectorField zero(const BasisSpec& spec);

  int m() const { return static_cast<int>(components_.size()); }
  int dim() const { return components_.empty() ? 0 : components_[0].dim(); }
  int n() const { return components_.empty() ? 0 : components_[0].n(); }
  const ScalarField& operator[](int a) const { return components_[a]; }
  ScalarField& operator[](int a) { return components_[a]; }
  const std::vector<ScalarField>& components() const { return components_; }
  Eigen::VectorXd stacked() const;
  VectorField resized(int n_new) const;

 private:
  std::vector<ScalarField> components_;
};

// psi_i and its derivatives sampled at quadrature nodes (rows: basis index).
struct BasisTable {
  QuadratureRule rule;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd dpsi;
  Eigen::MatrixXd d2psi;
  int n() const { return static_cast<int>(psi.rows()); }
};

BasisTable basis_table(int n, const QuadratureRule& rule);

// Values on a tensor quadrature grid: rows are x nodes, columns y nodes
// (a single column in 1D).
struct GridField {
  Eigen::MatrixXd values;
};

using GridVectorField = std::vector<GridField>;

GridField to_grid(const ScalarField& f, const BasisTable& t);
// -Laplacian of f sampled on the grid.
GridField laplacian(const ScalarField& f, const BasisTable& t);
// Load vector l_i = int g psi_i, local coefficient layout.
Eigen::VectorXd load(const GridField& g, const BasisTable& t, int dim);
double integrate(const GridField& g, const QuadratureRule& rule, int dim);
double grid_inner(const GridField& a, const GridField& b, const QuadratureRule& rule, int dim);
double grid_inner(const GridVectorField& a, const GridVectorField& b, const QuadratureRule& rule, int dim);

// Exact L2 and H1_0 inner products summed over components.
double inner_X(const VectorField& u, const VectorField& v);
double inner_V(const VectorField& u, const VectorField& v);

// Local Gram products: x^T (M or S-form) y for one component.
Eigen::VectorXd apply_mass_local(const Gram1D& g, int dim, const Eigen::VectorXd& x);
Eigen::VectorXd apply_stiffness_local(const Gram1D& g, int dim, const Eigen::VectorXd& x);

}  // namespace invnorm

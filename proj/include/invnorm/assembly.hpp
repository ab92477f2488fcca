#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "invnorm/coefficients.hpp"
#include "invnorm/spectral.hpp"

namespace invnorm {

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Stiffness D and mass matrices of the stacked basis. Only the tensor factors
// and Cholesky factors are stored:
//   Mass block = M (x) M (2D) or M (1D), factor L1 (x) L1 with M = L1 L1^T,
//   D block    = S (x) M + M (x) S (2D) or S (1D), banded Cholesky factor.
// Blocks repeat over the m components.
class GramMatrices {
 public:
  GramMatrices() = default;
  explicit GramMatrices(const BasisSpec& spec);

  const BasisSpec& spec() const { return spec_; }
  const Gram1D& factors() const { return g1_; }
  int order() const { return spec_.size(); }
  // Largest relative deviation between the closed-form 1D factors and a
  // raw quadrature re-evaluation (self-check of the assembly).
  double quadrature_defect() const { return quad_defect_; }

  Eigen::VectorXd apply_D(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_mass(const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve_D(const Eigen::VectorXd& b) const;

  // In-place products with the stiffness Cholesky factor L_D (block diagonal).
  void lower_D(double* x) const;                      // x := L_D x
  void lower_D_transpose(double* x) const;            // x := L_D^T x
  void solve_lower_D(double* b, int ld, int nrhs, bool transpose) const;  // L_D^{-1} or L_D^{-T}

  // Columns of an order x ncols column-major array: X := L_M^{-1} X or L_M^{-T} X.
  void solve_mass_factor(double* x, int ncols, bool transpose) const;

  Eigen::MatrixXd D_dense() const;
  Eigen::MatrixXd mass_dense() const;
  int band_width() const { return kd_; }

  // Test hook: scales one mass factor entry so that assembly self-checks fail.
  void corrupt_for_testing();

 private:
  BasisSpec spec_;
  Gram1D g1_;
  Eigen::MatrixXd L1_;        // lower Cholesky factor of the 1D mass
  std::vector<double> band_;  // band factor of one D block, ldab = kd + 1
  int kd_ = 0;
  double quad_defect_ = 0.0;
};

GramMatrices assemble_gram(const BasisSpec& spec);

// Quadrature points per dimension needed for the weighted mass matrices of q.
int q_quadrature_points(const BasisSpec& spec, const CoefficientMatrix& q);

struct QMatrix {
  Eigen::MatrixXd mat;            // Q_ij = (Q phi_j, phi_i)_X
  double symmetry_defect = 0.0;   // largest relative defect of the per-block weighted mass matrices
  int quad_points = 0;
};

QMatrix assemble_Q(const BasisSpec& spec, const CoefficientMatrix& q);

// Pencil of the modified problem, stored as W = L_D^{-1} Qmat^T so that
//   Q D^{-1} Q^T = W^T W,  lhs = D - Q - Q^T + W^T W.
class PencilMatrices {
 public:
  PencilMatrices() = default;
  PencilMatrices(const GramMatrices& gram, QMatrix q, std::optional<double> sigma);

  const GramMatrices& gram() const { return *gram_; }
  const Eigen::MatrixXd& w() const { return w_; }
  std::optional<double> sigma() const { return sigma_; }
  double symmetry_defect() const { return symmetry_defect_; }

  // Dense lhs = D - (Q + Q^T) + Q D^{-1} Q^T, exactly symmetric.
  Eigen::MatrixXd form_lhs() const;
  // Dense G = lhs + sigma * Mass; requires sigma.
  Eigen::MatrixXd form_G() const;
  Eigen::MatrixXd qmat() const;

  // lhs * X without forming lhs.
  Eigen::MatrixXd apply_lhs(const Eigen::MatrixXd& x) const;

 private:
  const GramMatrices* gram_ = nullptr;
  Eigen::MatrixXd w_;
  std::optional<double> sigma_;
  double symmetry_defect_ = 0.0;
};

PencilMatrices assemble_pencil(const GramMatrices& gram, QMatrix q, std::optional<double> sigma = std::nullopt);

// z = D^{-1} load(rhs): the Galerkin solution of -Delta z = rhs in V_h.
VectorField ritz_solve(const GramMatrices& gram, const GridVectorField& rhs, const BasisTable& table);

// Strong form of the modified operator,
//   S u = -Delta u - (q + q^T) u + q w + sigma u,  w = ritz_solve(q^T u),
// sampled on a grid. Coefficient grids are cached for repeated use.
class ModifiedOperator {
 public:
  ModifiedOperator(const GramMatrices& gram, const CoefficientMatrix& q, int quad_points = 0);

  const QuadratureRule& rule() const { return table_.rule; }
  const BasisTable& table() const { return table_; }
  GridVectorField apply(const VectorField& u, double sigma = 0.0) const;
  GridVectorField values(const VectorField& u) const;
  // Coefficients of w = A_h^{-1} P_h (q^T u).
  Eigen::VectorXd ritz_term(const VectorField& u) const;

 private:
  const GramMatrices* gram_;
  int dim_, m_;
  BasisTable table_;
  std::vector<GridField> q_;  // row-major m x m
};

// Quadrature points sufficient for products (S u_i, S u_k) with u in V_h.
int modified_operator_points(const BasisSpec& spec, const CoefficientMatrix& q);

// One-shot form on the grid of modified_operator_points.
GridVectorField apply_modified_operator(const VectorField& u, const CoefficientMatrix& q, const GramMatrices& gram,
                                        double sigma);

// Debug dump. Binary: int64 order, int32 symmetric flag, order^2 doubles row-major.
// CSV: header line "order,<n>,symmetric,<0|1>" then rows.
void dump_matrix(const Eigen::MatrixXd& a, const std::string& path, bool csv);

}  // namespace invnorm

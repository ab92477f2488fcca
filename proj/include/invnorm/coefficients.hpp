#pragma once

#include <vector>

#include <Eigen/Dense>

#include "invnorm/spectral.hpp"

namespace invnorm {

// Polynomial in the tensor shifted-Legendre basis P_i (x) P_j, i, j >= 0.
// Index i1 + n*i2 in 2D. Used for coefficients that do not vanish on the boundary.
class LegendreField {
 public:
  LegendreField() = default;
  LegendreField(int dim, int n, Eigen::VectorXd coeffs);

  int dim() const { return dim_; }
  int n() const { return n_; }
  int degree() const { return n_ == 0 ? 0 : n_ - 1; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double coeff(int i1, int i2 = 0) const { return coeffs_[i1 + n_ * i2]; }
  double value(double x, double y = 0.0) const;

 private:
  int dim_ = 1;
  int n_ = 0;
  Eigen::VectorXd coeffs_;
};

// One entry q_ab(x) = constant + psi-expansion + Legendre expansion.
struct CoefficientField {
  double constant = 0.0;
  ScalarField psi;        // empty when n() == 0
  LegendreField legendre;  // empty when n() == 0

  CoefficientField() = default;
  explicit CoefficientField(double c) : constant(c) {}
  CoefficientField(double c, ScalarField f) : constant(c), psi(std::move(f)) {}

  bool has_psi() const { return psi.n() > 0; }
  bool has_legendre() const { return legendre.n() > 0; }
  bool is_zero() const;
  int degree() const;
  double value(double x, double y = 0.0) const;
  GridField to_grid(const QuadratureRule& rule, int dim) const;
};

// m x m matrix of multiplication coefficients, (Qu)_a = sum_b q_ab u_b.
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;
  CoefficientMatrix(int dim, int m);
  static CoefficientMatrix scaled_identity(int dim, int m, double c);

  int dim() const { return dim_; }
  int m() const { return m_; }
  const CoefficientField& operator()(int a, int b) const { return entries_[a * m_ + b]; }
  CoefficientField& operator()(int a, int b) { return entries_[a * m_ + b]; }
  // Largest polynomial degree per variable over all entries.
  int degree() const;
  CoefficientMatrix transposed() const;
  double value(int a, int b, double x, double y = 0.0) const { return (*this)(a, b).value(x, y); }

 private:
  int dim_ = 1;
  int m_ = 0;
  std::vector<CoefficientField> entries_;
};

// Legendre P_i values at the nodes (rows: index 0..n-1).
Eigen::MatrixXd legendre_table(int n, const QuadratureRule& rule);

}  // namespace invnorm

#include "invnorm/coefficients.hpp"

#include <algorithm>

namespace invnorm {

LegendreField::LegendreField(int dim, int n, Eigen::VectorXd coeffs) : dim_(dim), n_(n), coeffs_(std::move(coeffs)) {
  if (dim != 1 && dim != 2) throw SpecError("dimension must be 1 or 2");
  const Eigen::Index expect = dim == 1 ? n : static_cast<Eigen::Index>(n) * n;
  if (coeffs_.size() != expect) throw SpecError("Legendre coefficient count does not match basis");
}

double LegendreField::value(double x, double y) const {
  if (n_ == 0) return 0.0;
  std::vector<double> px(n_), py(n_);
  legendre_all(n_ - 1, x, px.data(), nullptr);
  if (dim_ == 1) return Eigen::Map<Eigen::VectorXd>(px.data(), n_).dot(coeffs_);
  legendre_all(n_ - 1, y, py.data(), nullptr);
  double s = 0.0;
  for (int i2 = 0; i2 < n_; ++i2) {
    double inner = 0.0;
    for (int i1 = 0; i1 < n_; ++i1) inner += coeffs_[i1 + n_ * i2] * px[i1];
    s += inner * py[i2];
  }
  return s;
}

bool CoefficientField::is_zero() const {
  return constant == 0.0 && (!has_psi() || psi.coeffs().isZero(0.0)) &&
         (!has_legendre() || legendre.coeffs().isZero(0.0));
}

int CoefficientField::degree() const {
  int d = 0;
  if (has_psi()) d = std::max(d, psi.degree());
  if (has_legendre()) d = std::max(d, legendre.degree());
  return d;
}

double CoefficientField::value(double x, double y) const {
  double v = constant;
  if (has_psi()) v += psi.value(x, y);
  if (has_legendre()) v += legendre.value(x, y);
  return v;
}

Eigen::MatrixXd legendre_table(int n, const QuadratureRule& rule) {
  Eigen::MatrixXd T(n, rule.size());
  std::vector<double> P(std::max(n, 1));
  for (int k = 0; k < rule.size(); ++k) {
    legendre_all(n - 1, rule.nodes[k], P.data(), nullptr);
    for (int i = 0; i < n; ++i) T(i, k) = P[i];
  }
  return T;
}

GridField CoefficientField::to_grid(const QuadratureRule& rule, int dim) const {
  const int nq = rule.size();
  GridField g;
  g.values = Eigen::MatrixXd::Constant(nq, dim == 1 ? 1 : nq, constant);
  if (has_psi()) g.values += invnorm::to_grid(psi, basis_table(psi.n(), rule)).values;
  if (has_legendre()) {
    Eigen::MatrixXd T = legendre_table(legendre.n(), rule);
    if (dim == 1) {
      g.values.col(0) += T.transpose() * legendre.coeffs();
    } else {
      Eigen::Map<const Eigen::MatrixXd> C(legendre.coeffs().data(), legendre.n(), legendre.n());
      g.values += T.transpose() * C * T;
    }
  }
  return g;
}

CoefficientMatrix::CoefficientMatrix(int dim, int m) : dim_(dim), m_(m), entries_(static_cast<std::size_t>(m) * m) {
  if (dim != 1 && dim != 2) throw SpecError("dimension must be 1 or 2");
  if (m < 1) throw SpecError("component count must be at least 1");
}

CoefficientMatrix CoefficientMatrix::scaled_identity(int dim, int m, double c) {
  CoefficientMatrix q(dim, m);
  for (int a = 0; a < m; ++a) q(a, a).constant = c;
  return q;
}

int CoefficientMatrix::degree() const {
  int d = 0;
  for (const auto& e : entries_) d = std::max(d, e.degree());
  return d;
}

CoefficientMatrix CoefficientMatrix::transposed() const {
  CoefficientMatrix t(dim_, m_);
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b) t(a, b) = (*this)(b, a);
  return t;
}

}  // namespace invnorm

#include "invnorm/spectral.hpp"

#include <cmath>
#include <string>

namespace invnorm {

void BasisSpec::validate() const {
  if (dim != 1 && dim != 2) throw SpecError("dimension must be 1 or 2");
  if (m < 1) throw SpecError("component count must be at least 1");
  if (n < 1) throw SpecError("basis count must be at least 1");
  if (quad_order < 0) throw SpecError("quadrature order must be non-negative");
}

QuadratureRule gauss_rule(int n) {
  if (n < 1) throw SpecError("quadrature needs at least one point");
  QuadratureRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int k = 0; k < half; ++k) {
    double t = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 1; j < n; ++j) {
        double p2 = ((2 * j + 1) * t * p1 - j * p0) / (j + 1);
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? t : p1;
      double pm = n == 1 ? 1.0 : p0;
      dp = n * (t * pn - pm) / (t * t - 1.0);
      double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-17) break;
    }
    {
      double p0 = 1.0, p1 = t;
      for (int j = 1; j < n; ++j) {
        double p2 = ((2 * j + 1) * t * p1 - j * p0) / (j + 1);
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? t : p1;
      double pm = n == 1 ? 1.0 : p0;
      dp = n * (t * pn - pm) / (t * t - 1.0);
    }
    double w = 2.0 / ((1.0 - t * t) * dp * dp);
    // t is the k-th largest root; store ascending in x.
    r.nodes[n - 1 - k] = 0.5 * (1.0 + t);
    r.nodes[k] = 0.5 * (1.0 - t);
    r.weights[n - 1 - k] = 0.5 * w;
    r.weights[k] = 0.5 * w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.5;
  return r;
}

int quad_points_for_degree(int degree) { return std::max(degree, 0) / 2 + 2; }

void legendre_all(int nmax, double x, double* P, double* dP) {
  const double t = 2.0 * x - 1.0;
  P[0] = 1.0;
  if (nmax >= 1) P[1] = t;
  for (int k = 1; k < nmax; ++k) P[k + 1] = ((2 * k + 1) * t * P[k] - k * P[k - 1]) / (k + 1);
  if (!dP) return;
  // dP/dt recurrence P'_{k+1} = P'_{k-1} + (2k+1) P_k, then d/dx = 2 d/dt.
  dP[0] = 0.0;
  if (nmax >= 1) dP[1] = 1.0;
  for (int k = 1; k < nmax; ++k) dP[k + 1] = dP[k - 1] + (2 * k + 1) * P[k];
  for (int k = 0; k <= nmax; ++k) dP[k] *= 2.0;
}

double legendre_eval(int i, double x) {
  if (i < 0) throw SpecError("Legendre index must be non-negative");
  std::vector<double> P(i + 1);
  legendre_all(i, x, P.data(), nullptr);
  return P[i];
}

double legendre_deriv(int i, double x) {
  if (i < 0) throw SpecError("Legendre index must be non-negative");
  std::vector<double> P(i + 1), dP(i + 1);
  legendre_all(i, x, P.data(), dP.data());
  return dP[i];
}

double psi_eval(int i, double x) {
  if (i < 1) throw SpecError("psi index must be at least 1");
  std::vector<double> P(i + 2);
  legendre_all(i + 1, x, P.data(), nullptr);
  return (P[i - 1] - P[i + 1]) / (2.0 * (2 * i + 1));
}

double psi_deriv(int i, double x) {
  if (i < 1) throw SpecError("psi index must be at least 1");
  return -legendre_eval(i, x);
}

double psi_second(int i, double x) {
  if (i < 1) throw SpecError("psi index must be at least 1");
  return -legendre_deriv(i, x);
}

Gram1D gram_1d(int n) {
  if (n < 1) throw SpecError("basis count must be at least 1");
  Gram1D g;
  g.S = Eigen::MatrixXd::Zero(n, n);
  g.M = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double i = k + 1;
    g.S(k, k) = 1.0 / (2 * i + 1);
    g.M(k, k) = (1.0 / (2 * i - 1) + 1.0 / (2 * i + 3)) / (4.0 * (2 * i + 1) * (2 * i + 1));
    if (k + 2 < n) {
      double off = -1.0 / (4.0 * (2 * i + 1) * (2 * i + 3) * (2 * i + 5));
      g.M(k, k + 2) = off;
      g.M(k + 2, k) = off;
    }
  }
  return g;
}

ScalarField::ScalarField(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw SpecError("dimension must be 1 or 2");
  coeffs_ = Eigen::VectorXd::Zero(dim == 1 ? n : n * n);
}

ScalarField::ScalarField(int dim, int n, Eigen::VectorXd coeffs) : ScalarField(dim, n) {
  if (coeffs.size() != coeffs_.size()) throw SpecError("coefficient count does not match basis");
  coeffs_ = std::move(coeffs);
}

double ScalarField::value(double x, double y) const {
  if (n_ == 0) return 0.0;
  std::vector<double> px(n_), py(n_);
  for (int i = 0; i < n_; ++i) px[i] = psi_eval(i + 1, x);
  if (dim_ == 1) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += coeffs_[i] * px[i];
    return s;
  }
  for (int i = 0; i < n_; ++i) py[i] = psi_eval(i + 1, y);
  double s = 0.0;
  for (int i2 = 0; i2 < n_; ++i2) {
    double inner = 0.0;
    for (int i1 = 0; i1 < n_; ++i1) inner += coeffs_[i1 + n_ * i2] * px[i1];
    s += inner * py[i2];
  }
  return s;
}

ScalarField ScalarField::resized(int n_new) const {
  ScalarField r(dim_, n_new);
  const int c = std::min(n_, n_new);
  if (dim_ == 1) {
    r.coeffs_.head(c) = coeffs_.head(c);
  } else {
    for (int i2 = 0; i2 < c; ++i2)
      for (int i1 = 0; i1 < c; ++i1) r.coeffs_[i1 + n_new * i2] = coeffs_[i1 + n_ * i2];
  }
  return r;
}

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.dim() != components_[0].dim() || c.n() != components_[0].n())
      throw SpecError("vector field components use different bases");
  }
}

VectorField VectorField::from_stacked(const BasisSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.size()) throw SpecError("stacked vector length does not match basis");
  std::vector<ScalarField> comps;
  const int ls = spec.local_size();
  for (int a = 0; a < spec.m; ++a) comps.emplace_back(spec.dim, spec.n, Eigen::VectorXd(x.segment(a * ls, ls)));
  return VectorField(std::move(comps));
}

VectorField VectorField::zero(const BasisSpec& spec) {
  return from_stacked(spec, Eigen::VectorXd::Zero(spec.size()));
}

Eigen::VectorXd VectorField::stacked() const {
  Eigen::Index total = 0;
  for (const auto& c : components_) total += c.coeffs().size();
  Eigen::VectorXd x(total);
  Eigen::Index off = 0;
  for (const auto& c : components_) {
    x.segment(off, c.coeffs().size()) = c.coeffs();
    off += c.coeffs().size();
  }
  return x;
}

VectorField VectorField::resized(int n_new) const {
  std::vector<ScalarField> comps;
  for (const auto& c : components_) comps.push_back(c.resized(n_new));
  return VectorField(std::move(comps));
}

BasisTable basis_table(int n, const QuadratureRule& rule) {
  BasisTable t;
  t.rule = rule;
  const int nq = rule.size();
  t.psi.resize(n, nq);
  t.dpsi.resize(n, nq);
  t.d2psi.resize(n, nq);
  std::vector<double> P(n + 2), dP(n + 2);
  for (int k = 0; k < nq; ++k) {
    legendre_all(n + 1, rule.nodes[k], P.data(), dP.data());
    for (int i = 1; i <= n; ++i) {
      t.psi(i - 1, k) = (P[i - 1] - P[i + 1]) / (2.0 * (2 * i + 1));
      t.dpsi(i - 1, k) = -P[i];
      t.d2psi(i - 1, k) = -dP[i];
    }
  }
  return t;
}

namespace {

Eigen::Map<const Eigen::MatrixXd> coeff_matrix(const ScalarField& f) {
  return Eigen::Map<const Eigen::MatrixXd>(f.coeffs().data(), f.n(), f.n());
}

void check_table(const ScalarField& f, const BasisTable& t) {
  if (f.n() > t.n()) throw SpecError("basis table smaller than field basis");
}

}  // namespace

GridField to_grid(const ScalarField& f, const BasisTable& t) {
  check_table(f, t);
  const int n = f.n();
  GridField g;
  if (f.dim() == 1) {
    g.values = t.psi.topRows(n).transpose() * f.coeffs();
  } else {
    auto P = t.psi.topRows(n);
    g.values = P.transpose() * coeff_matrix(f) * P;
  }
  return g;
}

GridField laplacian(const ScalarField& f, const BasisTable& t) {
  check_table(f, t);
  const int n = f.n();
  GridField g;
  if (f.dim() == 1) {
    g.values = -(t.d2psi.topRows(n).transpose() * f.coeffs());
  } else {
    auto P = t.psi.topRows(n);
    auto D2 = t.d2psi.topRows(n);
    auto C = coeff_matrix(f);
    g.values = -(D2.transpose() * C * P + P.transpose() * C * D2);
  }
  return g;
}

Eigen::VectorXd load(const GridField& g, const BasisTable& t, int dim) {
  const int nq = t.rule.size();
  Eigen::Map<const Eigen::VectorXd> w(t.rule.weights.data(), nq);
  if (dim == 1) return t.psi * (w.array() * g.values.col(0).array()).matrix();
  Eigen::MatrixXd wg = w.asDiagonal() * g.values * w.asDiagonal();
  Eigen::MatrixXd L = t.psi * wg * t.psi.transpose();
  return Eigen::Map<Eigen::VectorXd>(L.data(), L.size());
}

double integrate(const GridField& g, const QuadratureRule& rule, int dim) {
  Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.size());
  if (dim == 1) return w.dot(g.values.col(0));
  return w.dot(g.values * w);
}

double grid_inner(const GridField& a, const GridField& b, const QuadratureRule& rule, int dim) {
  GridField p;
  p.values = a.values.cwiseProduct(b.values);
  return integrate(p, rule, dim);
}

double grid_inner(const GridVectorField& a, const GridVectorField& b, const QuadratureRule& rule, int dim) {
  if (a.size() != b.size()) throw SpecError("grid fields with different component counts");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += grid_inner(a[k], b[k], rule, dim);
  return s;
}

Eigen::VectorXd apply_mass_local(const Gram1D& g, int dim, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(g.M.rows());
  if (dim == 1) return g.M * x;
  Eigen::Map<const Eigen::MatrixXd> X(x.data(), n, n);
  Eigen::MatrixXd Y = g.M * X * g.M;
  return Eigen::Map<Eigen::VectorXd>(Y.data(), Y.size());
}

Eigen::VectorXd apply_stiffness_local(const Gram1D& g, int dim, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(g.S.rows());
  if (dim == 1) return g.S * x;
  Eigen::Map<const Eigen::MatrixXd> X(x.data(), n, n);
  Eigen::MatrixXd Y = g.S * X * g.M + g.M * X * g.S;
  return Eigen::Map<Eigen::VectorXd>(Y.data(), Y.size());
}

namespace {

void check_pair(const VectorField& u, const VectorField& v) {
  if (u.m() != v.m() || u.dim() != v.dim() || u.n() != v.n())
    throw SpecError("inner product of fields with mismatched bases");
}

}  // namespace

double inner_X(const VectorField& u, const VectorField& v) {
  check_pair(u, v);
  if (u.m() == 0) return 0.0;
  Gram1D g = gram_1d(u.n());
  double s = 0.0;
  for (int a = 0; a < u.m(); ++a) s += u[a].coeffs().dot(apply_mass_local(g, u.dim(), v[a].coeffs()));
  return s;
}

double inner_V(const VectorField& u, const VectorField& v) {
  check_pair(u, v);
  if (u.m() == 0) return 0.0;
  Gram1D g = gram_1d(u.n());
  double s = 0.0;
  for (int a = 0; a < u.m(); ++a) s += u[a].coeffs().dot(apply_stiffness_local(g, u.dim(), v[a].coeffs()));
  return s;
}

}  // namespace invnorm

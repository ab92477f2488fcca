#include "invnorm/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>

#include "linalg.hpp"

namespace invnorm {

namespace {

double max_abs(const Eigen::MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double relative_defect(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(max_abs(a), max_abs(b));
  return scale == 0.0 ? 0.0 : max_abs(a - b) / scale;
}

// Entry of one stiffness block, local indices.
double d_entry(const Gram1D& g, int dim, int n, int i, int j) {
  if (dim == 1) return g.S(i, j);
  const int i1 = i % n, i2 = i / n, j1 = j % n, j2 = j / n;
  return g.S(i1, j1) * g.M(i2, j2) + g.M(i1, j1) * g.S(i2, j2);
}

// Largest relative deviation of the 1D factors from a raw quadrature evaluation
// with five extra points.
double quadrature_check(const Gram1D& g, int n) {
  const int nq = quad_points_for_degree(2 * (n + 1)) + 5;
  BasisTable t = basis_table(n, gauss_rule(nq));
  Eigen::Map<const Eigen::VectorXd> w(t.rule.weights.data(), nq);
  Eigen::MatrixXd Sq = t.dpsi * w.asDiagonal() * t.dpsi.transpose();
  Eigen::MatrixXd Mq = t.psi * w.asDiagonal() * t.psi.transpose();
  return std::max(relative_defect(Sq, g.S), relative_defect(Mq, g.M));
}

}  // namespace

GramMatrices::GramMatrices(const BasisSpec& spec) : spec_(spec) {
  spec.validate();
  const int n = spec.n;
  g1_ = gram_1d(n);

  quad_defect_ = quadrature_check(g1_, n);

  Eigen::LLT<Eigen::MatrixXd> llt(g1_.M);
  if (llt.info() != Eigen::Success) throw AssemblyError("mass matrix is not positive definite");
  L1_ = llt.matrixL();

  const int L = spec.local_size();
  kd_ = spec.dim == 1 ? 0 : std::min(2 * n, L - 1);
  band_.assign(static_cast<std::size_t>(kd_ + 1) * L, 0.0);
  for (int j = 0; j < L; ++j)
    for (int i = j; i <= std::min(L - 1, j + kd_); ++i)
      band_[(i - j) + static_cast<std::size_t>(j) * (kd_ + 1)] = d_entry(g1_, spec.dim, n, i, j);
  if (lapack::pbtrf(L, kd_, band_.data()) != 0) throw AssemblyError("stiffness matrix is not positive definite");
}

GramMatrices assemble_gram(const BasisSpec& spec) { return GramMatrices(spec); }

void GramMatrices::corrupt_for_testing() {
  g1_.M(0, 0) *= 1.0 + 1e-6;
  quad_defect_ = quadrature_check(g1_, spec_.n);
}

Eigen::VectorXd GramMatrices::apply_D(const Eigen::VectorXd& x) const {
  const int L = spec_.local_size();
  Eigen::VectorXd y(x.size());
  for (int a = 0; a < spec_.m; ++a)
    y.segment(a * L, L) = apply_stiffness_local(g1_, spec_.dim, x.segment(a * L, L));
  return y;
}

Eigen::VectorXd GramMatrices::apply_mass(const Eigen::VectorXd& x) const {
  const int L = spec_.local_size();
  Eigen::VectorXd y(x.size());
  for (int a = 0; a < spec_.m; ++a) y.segment(a * L, L) = apply_mass_local(g1_, spec_.dim, x.segment(a * L, L));
  return y;
}

Eigen::VectorXd GramMatrices::solve_D(const Eigen::VectorXd& b) const {
  const int L = spec_.local_size();
  Eigen::VectorXd x = b;
  for (int a = 0; a < spec_.m; ++a) lapack::pbtrs(L, kd_, band_.data(), x.data() + a * L, L, 1);
  return x;
}

void GramMatrices::lower_D(double* x) const {
  const int L = spec_.local_size();
  for (int a = 0; a < spec_.m; ++a) lapack::tbmv(false, L, kd_, band_.data(), x + a * L);
}

void GramMatrices::lower_D_transpose(double* x) const {
  const int L = spec_.local_size();
  for (int a = 0; a < spec_.m; ++a) lapack::tbmv(true, L, kd_, band_.data(), x + a * L);
}

void GramMatrices::solve_lower_D(double* b, int ld, int nrhs, bool transpose) const {
  const int L = spec_.local_size();
  for (int a = 0; a < spec_.m; ++a) lapack::tbtrs(transpose, L, kd_, band_.data(), b + a * L, ld, nrhs);
}

void GramMatrices::solve_mass_factor(double* x, int ncols, bool transpose) const {
  const int n = spec_.n;
  const long blocks = static_cast<long>(spec_.m) * ncols;
  if (spec_.dim == 1) {
    lapack::trsm(true, transpose, n, static_cast<int>(blocks), L1_.data(), n, x, n);
    return;
  }
  // (L1 (x) L1)^{-1} vec(X) = vec(L1^{-1} X L1^{-T}); transposed: vec(L1^{-T} X L1^{-1}).
  lapack::trsm(true, transpose, n, static_cast<int>(blocks * n), L1_.data(), n, x, n);
  for (long b = 0; b < blocks; ++b)
    lapack::trsm(false, !transpose, n, n, L1_.data(), n, x + b * static_cast<long>(n) * n, n);
}

Eigen::MatrixXd GramMatrices::D_dense() const {
  const int L = spec_.local_size(), N = order();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int a = 0; a < spec_.m; ++a)
    for (int j = 0; j < L; ++j)
      for (int i = 0; i < L; ++i) D(a * L + i, a * L + j) = d_entry(g1_, spec_.dim, spec_.n, i, j);
  return D;
}

Eigen::MatrixXd GramMatrices::mass_dense() const {
  const int L = spec_.local_size(), N = order(), n = spec_.n;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int a = 0; a < spec_.m; ++a)
    for (int j = 0; j < L; ++j)
      for (int i = 0; i < L; ++i) {
        double v = spec_.dim == 1 ? g1_.M(i, j) : g1_.M(i % n, j % n) * g1_.M(i / n, j / n);
        M(a * L + i, a * L + j) = v;
      }
  return M;
}

int q_quadrature_points(const BasisSpec& spec, const CoefficientMatrix& q) {
  const int degree = q.degree() + 2 * (spec.n + 1);
  if (spec.quad_order > 0) {
    if (2 * spec.quad_order - 1 < degree)
      throw AssemblyError("quadrature order " + std::to_string(spec.quad_order) + " cannot integrate degree " +
                          std::to_string(degree) + " exactly");
    return spec.quad_order;
  }
  return quad_points_for_degree(degree);
}

QMatrix assemble_Q(const BasisSpec& spec, const CoefficientMatrix& q) {
  spec.validate();
  if (q.m() != spec.m || q.dim() != spec.dim) throw AssemblyError("coefficient matrix does not match basis");
  QMatrix out;
  const int n = spec.n, L = spec.local_size(), N = spec.size();
  const int nq = q_quadrature_points(spec, q);
  out.quad_points = nq;
  out.mat = Eigen::MatrixXd::Zero(N, N);
  const QuadratureRule rule = gauss_rule(nq);
  const BasisTable t = basis_table(n, rule);
  // B1(i + n j, k) = w_k psi_i(x_k) psi_j(x_k)
  Eigen::MatrixXd B1(static_cast<Eigen::Index>(n) * n, nq);
  for (int k = 0; k < nq; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) B1(i + n * j, k) = rule.weights[k] * t.psi(i, k) * t.psi(j, k);

  for (int a = 0; a < spec.m; ++a)
    for (int b = 0; b < spec.m; ++b) {
      const CoefficientField& f = q(a, b);
      if (f.is_zero()) continue;
      const GridField g = f.to_grid(rule, spec.dim);
      Eigen::MatrixXd blk(L, L);
      if (spec.dim == 1) {
        Eigen::VectorXd v = B1 * g.values.col(0);
        blk = Eigen::Map<Eigen::MatrixXd>(v.data(), n, n);
      } else {
        Eigen::MatrixXd T = B1 * g.values;       // (i1 j1) x k2
        Eigen::MatrixXd R = T * B1.transpose();  // (i1 j1) x (i2 j2)
        for (int j2 = 0; j2 < n; ++j2)
          for (int i2 = 0; i2 < n; ++i2) {
            const Eigen::Index col = i2 + static_cast<Eigen::Index>(n) * j2;
            for (int j1 = 0; j1 < n; ++j1)
              for (int i1 = 0; i1 < n; ++i1) blk(i1 + n * i2, j1 + n * j2) = R(i1 + n * j1, col);
          }
      }
      out.symmetry_defect = std::max(out.symmetry_defect, relative_defect(blk, blk.transpose()));
      out.mat.block(a * L, b * L, L, L) = 0.5 * (blk + blk.transpose());
    }
  return out;
}

PencilMatrices::PencilMatrices(const GramMatrices& gram, QMatrix q, std::optional<double> sigma)
    : gram_(&gram), w_(std::move(q.mat)), sigma_(sigma), symmetry_defect_(q.symmetry_defect) {
  const int N = gram.order();
  if (w_.rows() != N || w_.cols() != N) throw AssemblyError("Q matrix size does not match basis");
  w_.transposeInPlace();
  gram.solve_lower_D(w_.data(), N, N, false);
}

PencilMatrices assemble_pencil(const GramMatrices& gram, QMatrix q, std::optional<double> sigma) {
  return PencilMatrices(gram, std::move(q), sigma);
}

Eigen::MatrixXd PencilMatrices::qmat() const {
  Eigen::MatrixXd a = w_;
  for (Eigen::Index c = 0; c < a.cols(); ++c) gram_->lower_D(a.col(c).data());
  a.transposeInPlace();
  return a;
}

Eigen::MatrixXd PencilMatrices::form_lhs() const {
  const int N = gram_->order();
  Eigen::MatrixXd a = w_;
  for (int c = 0; c < N; ++c) gram_->lower_D(a.col(c).data());  // Q^T
  for (int j = 0; j < N; ++j) {
    a(j, j) = -2.0 * a(j, j);
    for (int i = j + 1; i < N; ++i) {
      const double s = -(a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  const BasisSpec& spec = gram_->spec();
  const int L = spec.local_size(), kd = gram_->band_width();
  for (int b = 0; b < spec.m; ++b)
    for (int j = 0; j < L; ++j)
      for (int i = j; i <= std::min(L - 1, j + kd); ++i) {
        const double d = d_entry(gram_->factors(), spec.dim, spec.n, i, j);
        if (d == 0.0) continue;
        a(b * L + i, b * L + j) += d;
        if (i != j) a(b * L + j, b * L + i) += d;
      }
  lapack::syrk_t(N, N, 1.0, w_.data(), N, 1.0, a.data(), N);
  for (int j = 0; j < N; ++j)
    for (int i = j + 1; i < N; ++i) a(j, i) = a(i, j);
  return a;
}

Eigen::MatrixXd PencilMatrices::form_G() const {
  if (!sigma_) throw AssemblyError("shifted matrix requested without sigma");
  return form_lhs() + *sigma_ * gram_->mass_dense();
}

Eigen::MatrixXd PencilMatrices::apply_lhs(const Eigen::MatrixXd& x) const {
  const Eigen::Index k = x.cols();
  Eigen::MatrixXd y(x.rows(), k), z(x.rows(), k);
  Eigen::MatrixXd dx(x.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    dx.col(c) = gram_->apply_D(x.col(c));
    y.col(c) = x.col(c);
    gram_->lower_D_transpose(y.col(c).data());
  }
  z.noalias() = w_ * x;
  Eigen::MatrixXd lz = z;
  for (Eigen::Index c = 0; c < k; ++c) gram_->lower_D(lz.col(c).data());
  Eigen::MatrixXd t = z - y;
  Eigen::MatrixXd out = dx - lz;
  out.noalias() += w_.transpose() * t;
  return out;
}

VectorField ritz_solve(const GramMatrices& gram, const GridVectorField& rhs, const BasisTable& table) {
  const BasisSpec& spec = gram.spec();
  if (static_cast<int>(rhs.size()) != spec.m) throw AssemblyError("right-hand side has wrong component count");
  const int L = spec.local_size();
  Eigen::VectorXd b(spec.size());
  for (int a = 0; a < spec.m; ++a) b.segment(a * L, L) = load(rhs[a], table, spec.dim);
  return VectorField::from_stacked(spec, gram.solve_D(b));
}

int modified_operator_points(const BasisSpec& spec, const CoefficientMatrix& q) {
  return quad_points_for_degree(2 * (spec.n + 1 + q.degree()));
}

ModifiedOperator::ModifiedOperator(const GramMatrices& gram, const CoefficientMatrix& q, int quad_points)
    : gram_(&gram), dim_(gram.spec().dim), m_(gram.spec().m) {
  if (q.m() != m_ || q.dim() != dim_) throw AssemblyError("coefficient matrix does not match basis");
  const int nq = quad_points > 0 ? quad_points : modified_operator_points(gram.spec(), q);
  table_ = basis_table(gram.spec().n, gauss_rule(nq));
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b) q_.push_back(q(a, b).to_grid(table_.rule, dim_));
}

GridVectorField ModifiedOperator::values(const VectorField& u) const {
  GridVectorField g;
  for (int a = 0; a < u.m(); ++a) g.push_back(to_grid(u[a], table_));
  return g;
}

Eigen::VectorXd ModifiedOperator::ritz_term(const VectorField& u) const {
  const GridVectorField U = values(u);
  GridVectorField qt(m_);
  for (int a = 0; a < m_; ++a) {
    qt[a].values = Eigen::MatrixXd::Zero(U[0].values.rows(), U[0].values.cols());
    for (int b = 0; b < m_; ++b) qt[a].values += q_[b * m_ + a].values.cwiseProduct(U[b].values);
  }
  return ritz_solve(*gram_, qt, table_).stacked();
}

GridVectorField ModifiedOperator::apply(const VectorField& u, double sigma) const {
  if (u.m() != m_) throw AssemblyError("field has wrong component count");
  const GridVectorField U = values(u);
  const VectorField w = VectorField::from_stacked(gram_->spec(), ritz_term(u));
  const GridVectorField Wg = values(w);
  GridVectorField out(m_);
  for (int a = 0; a < m_; ++a) {
    Eigen::MatrixXd s = laplacian(u[a], table_).values;
    for (int b = 0; b < m_; ++b) {
      s -= (q_[a * m_ + b].values + q_[b * m_ + a].values).cwiseProduct(U[b].values);
      s += q_[a * m_ + b].values.cwiseProduct(Wg[b].values);
    }
    if (sigma != 0.0) s += sigma * U[a].values;
    out[a].values = std::move(s);
  }
  return out;
}

GridVectorField apply_modified_operator(const VectorField& u, const CoefficientMatrix& q, const GramMatrices& gram,
                                        double sigma) {
  return ModifiedOperator(gram, q).apply(u, sigma);
}

void dump_matrix(const Eigen::MatrixXd& a, const std::string& path, bool csv) {
  const bool sym = a.rows() == a.cols() && a.isApprox(a.transpose(), 0.0);
  if (csv) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "order," << a.rows() << ",symmetric," << (sym ? 1 : 0) << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) os << (j ? "," : "") << a(i, j);
      os << '\n';
    }
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  const std::int64_t order = a.rows();
  const std::int32_t flag = sym ? 1 : 0;
  os.write(reinterpret_cast<const char*>(&order), sizeof order);
  os.write(reinterpret_cast<const char*>(&flag), sizeof flag);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}

}  // namespace invnorm

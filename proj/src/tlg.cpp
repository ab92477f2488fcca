#include "invnorm/tlg.hpp"

#include <algorithm>
#include <cmath>

#include "invnorm/eig.hpp"

namespace invnorm {

namespace {

double max_abs(const Eigen::MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double sym_defect(const Eigen::MatrixXd& a) {
  const double s = max_abs(a);
  return s == 0.0 ? 0.0 : max_abs(a - a.transpose()) / s;
}

void finish(LehmannMatrices& m) {
  m.symmetry_defect = std::max({sym_defect(m.M0), sym_defect(m.M1), sym_defect(m.M2)});
  m.M0 = 0.5 * (m.M0 + m.M0.transpose()).eval();
  m.M1 = 0.5 * (m.M1 + m.M1.transpose()).eval();
  m.M2 = 0.5 * (m.M2 + m.M2.transpose()).eval();
  const SymEig e = sym_eig(m.M0);
  if (!(e.values[0] > 0)) throw TlgError("trial functions are linearly dependent");
  m.m0_condition = e.values[e.values.size() - 1] / e.values[0];
  if (m.m0_condition > 1e12) throw TlgError("trial set is ill-conditioned (Gram condition number above 1e12)");
}

}  // namespace

LehmannMatrices lehmann_matrices(const std::vector<VectorField>& trials, const CoefficientMatrix& q,
                                 const GramMatrices& gram, const PencilMatrices* cross_check) {
  if (trials.empty()) throw TlgError("empty trial set");
  const int n = static_cast<int>(trials.size());
  const BasisSpec& spec = gram.spec();
  ModifiedOperator S(gram, q);
  std::vector<GridVectorField> su, u;
  Eigen::MatrixXd X(spec.size(), n);
  for (int i = 0; i < n; ++i) {
    if (trials[i].m() != spec.m || trials[i].n() != spec.n || trials[i].dim() != spec.dim)
      throw TlgError("trial function does not match the basis");
    su.push_back(S.apply(trials[i]));
    u.push_back(S.values(trials[i]));
    X.col(i) = trials[i].stacked();
  }
  LehmannMatrices m;
  m.M0.resize(n, n);
  m.M1.resize(n, n);
  m.M2.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd mx = gram.apply_mass(X.col(i));
    for (int k = 0; k < n; ++k) {
      m.M0(i, k) = X.col(k).dot(mx);
      m.M1(i, k) = grid_inner(su[i], u[k], S.rule(), spec.dim);
      m.M2(i, k) = grid_inner(su[i], su[k], S.rule(), spec.dim);
    }
  }
  if (cross_check) {
    const Eigen::MatrixXd form = X.transpose() * cross_check->apply_lhs(X);
    const double scale = std::max(max_abs(m.M1), 1e-300);
    m.form_consistency = max_abs(form - m.M1) / scale;
    if (m.form_consistency > 1e-9)
      throw TlgError("strong-form operator disagrees with the assembled bilinear form (relative " +
                     std::to_string(m.form_consistency) + ")");
  }
  finish(m);
  return m;
}

LehmannMatrices lehmann_matrices(const Eigen::MatrixXd& op, const Eigen::MatrixXd& trials) {
  if (trials.cols() == 0) throw TlgError("empty trial set");
  LehmannMatrices m;
  const Eigen::MatrixXd su = op * trials;
  m.M0 = trials.transpose() * trials;
  m.M1 = su.transpose() * trials;
  m.M2 = su.transpose() * su;
  finish(m);
  return m;
}

RefinedBound lehmann_bounds(const LehmannMatrices& mats, const Interval& rho, int j, double strict_tol) {
  const Eigen::Index n = mats.M0.rows();
  if (j < 2) throw TlgError("gap index must be at least 2");
  if (n < j - 1) throw TlgError("fewer trial functions than eigenvalues below rho");
  const double r = rho.lo();
  RefinedBound out;
  out.rho = Interval(r);

  // Rayleigh-Ritz values of the trial space: strictness check below rho.
  {
    const Eigen::MatrixXd L0 = cholesky(mats.M0);
    const Eigen::MatrixXd Li = L0.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    const SymEig e = sym_eig(Li * mats.M1 * Li.transpose());
    out.ritz.assign(e.values.data(), e.values.data() + n);
  }
  if (out.ritz[j - 2] >= r - strict_tol)
    throw TlgError("trial Rayleigh-Ritz value " + std::to_string(out.ritz[j - 2]) +
                   " is not below rho = " + std::to_string(r));

  const Eigen::MatrixXd A = mats.M1 - r * mats.M0;
  const Eigen::MatrixXd B = mats.M2 - 2.0 * r * mats.M1 + r * r * mats.M0;
  Eigen::MatrixXd L;
  try {
    L = cholesky(0.5 * (B + B.transpose()));
  } catch (const NotPositiveDefinite&) {
    throw TlgError("Lehmann right-hand matrix is not positive definite");
  }
  const Eigen::MatrixXd Li = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  const SymEig e = sym_eig(Li * A * Li.transpose());
  for (Eigen::Index p = 0; p < n; ++p) {
    const double t = e.values[p];
    if (t >= 0) break;
    // Residual enclosure of tau for the definite pencil (A, B).
    const Eigen::VectorXd x = Li.transpose() * e.vectors.col(p);
    const Eigen::VectorXd res = Li * (A * x - t * (B * x));
    Interval rr(0), xb(0);
    for (Eigen::Index i = 0; i < n; ++i) rr += sqr(Interval(res[i]));
    const Eigen::VectorXd bx = B * x;
    for (Eigen::Index i = 0; i < n; ++i) xb += Interval(x[i]) * Interval(bx[i]);
    const double eta = (sqrt(rr) / sqrt(xb)).hi();
    const Interval tau((Interval(t) - Interval(eta)).lo(), (Interval(t) + Interval(eta)).hi());
    if (!(tau.hi() < 0)) break;
    out.tau.push_back(tau);
  }
  if (static_cast<int>(out.tau.size()) < j - 1)
    throw TlgError("only " + std::to_string(out.tau.size()) + " negative Lehmann eigenvalues, need " +
                   std::to_string(j - 1));
  // lambda^(j-p) >= rho + 1/tau_p
  out.lower.assign(j - 1, Interval(0.0));
  for (int p = 1; p <= j - 1; ++p) out.lower[j - 1 - p] = out.rho + Interval(1.0) / out.tau[p - 1];
  out.lambda1_lower = out.lower[0];
  if (out.lambda1_lower.lo() > out.ritz[0])
    throw std::logic_error("Lehmann lower bound exceeds the Rayleigh-Ritz upper bound");
  return out;
}

}  // namespace invnorm

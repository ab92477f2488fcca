#include "invnorm/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linalg.hpp"

namespace invnorm {

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("Cholesky of a non-square matrix");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) throw NotPositiveDefinite("matrix is not positive definite (pivot " + std::to_string(j) + ")");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
  }
  return l;
}

SymEig sym_eig(const Eigen::MatrixXd& input) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("eigenproblem of a non-square matrix");
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double fro = a.norm();
  SymEig out;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= 1e-15 * fro || fro == 0.0) break;
    out.sweeps = sweep + 1;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(idx[k], idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
  }
  return out;
}

Interval EigenPair::enclosure() const {
  const double eta = residual_bound.hi();
  return Interval((Interval(value) - Interval(eta)).lo(), (Interval(value) + Interval(eta)).hi());
}

EigOptions::Backend parse_backend(const std::string& s) {
  if (s == "auto") return EigOptions::Backend::automatic;
  if (s == "jacobi") return EigOptions::Backend::jacobi;
  if (s == "lapack") return EigOptions::Backend::lapack;
  throw std::invalid_argument("unknown eigen backend '" + s + "'");
}

std::string to_string(EigOptions::Backend b) {
  switch (b) {
    case EigOptions::Backend::automatic:
      return "auto";
    case EigOptions::Backend::jacobi:
      return "jacobi";
    case EigOptions::Backend::lapack:
      return "lapack";
  }
  return "auto";
}

namespace {

Interval norm2(const double* x, Eigen::Index n) {
  Interval s(0);
  for (Eigen::Index i = 0; i < n; ++i) s += sqr(Interval(x[i]));
  return sqrt(s);
}

}  // namespace

std::vector<Interval> residual_bounds(const PencilMatrices& pencil, const Eigen::MatrixXd& x,
                                      const std::vector<double>& values) {
  const GramMatrices& gram = pencil.gram();
  const Eigen::Index k = x.cols();
  Eigen::MatrixXd mx(x.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) mx.col(c) = gram.apply_mass(x.col(c));
  Eigen::MatrixXd r = pencil.apply_lhs(x);
  for (Eigen::Index c = 0; c < k; ++c) r.col(c) -= values[c] * mx.col(c);
  gram.solve_mass_factor(r.data(), static_cast<int>(k), false);
  std::vector<Interval> out;
  for (Eigen::Index c = 0; c < k; ++c) {
    Interval xm(0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) xm += Interval(x(i, c)) * Interval(mx(i, c));
    if (!(xm.lo() > 0)) throw NotPositiveDefinite("eigenvector with non-positive Mass norm");
    const Interval eta = norm2(r.col(c).data(), r.rows()) / sqrt(xm);
    out.emplace_back(0.0, eta.hi());
  }
  return out;
}

SpectrumSlice gen_eig_smallest(const PencilMatrices& pencil, int k, const EigOptions& opt) {
  const GramMatrices& gram = pencil.gram();
  const int n = gram.order();
  k = std::clamp(k, 1, n);
  SpectrumSlice out;
  // B = L_M^{-1} lhs L_M^{-T}
  Eigen::MatrixXd b = pencil.form_lhs();
  gram.solve_mass_factor(b.data(), n, false);
  b.transposeInPlace();
  gram.solve_mass_factor(b.data(), n, false);

  bool use_jacobi = opt.backend == EigOptions::Backend::jacobi ||
                    (opt.backend == EigOptions::Backend::automatic && n <= opt.jacobi_limit);
  std::vector<double> values(k);
  Eigen::MatrixXd y(n, k);
  if (use_jacobi) {
    out.backend = "jacobi";
    b = 0.5 * (b + b.transpose()).eval();
    SymEig e = sym_eig(b);
    for (int i = 0; i < k; ++i) values[i] = e.values[i];
    y = e.vectors.leftCols(k);
  } else {
    out.backend = "lapack-syevr";
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i) b(i, j) = 0.5 * (b(i, j) + b(j, i));
    std::vector<double> w, z;
    const int info = lapack::syevr_smallest(n, b.data(), n, k, w, z);
    if (info != 0) throw std::runtime_error("symmetric eigensolver failed (info " + std::to_string(info) + ")");
    values = w;
    y = Eigen::Map<Eigen::MatrixXd>(z.data(), n, k);
  }
  b.resize(0, 0);
  gram.solve_mass_factor(y.data(), k, true);  // x = L_M^{-T} y
  std::vector<Interval> eta(k, Interval(0.0));
  if (opt.residual_bounds) eta = residual_bounds(pencil, y, values);
  for (int i = 0; i < k; ++i) out.pairs.push_back({values[i], y.col(i), eta[i]});
  return out;
}

}  // namespace invnorm

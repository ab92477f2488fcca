#include <cmath>
#include <numbers>
#include <random>

#include <quadmath.h>

#include <gtest/gtest.h>

#include "invnorm/eig.hpp"

using namespace invnorm;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> G;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = G(rng);
  return a;
}

// Cyclic Jacobi in binary128, eigenvalues only.
std::vector<__float128> quad_eigenvalues(const Eigen::MatrixXd& in) {
  const int n = static_cast<int>(in.rows());
  std::vector<__float128> a(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i * n + j] = in(i, j);
  auto A = [&](int i, int j) -> __float128& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 60; ++sweep) {
    __float128 off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) off += A(i, j) * A(i, j);
    if (off < 1e-60Q) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (A(p, q) == 0) continue;
        const __float128 theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
        const __float128 t = (theta >= 0 ? 1 : -1) / (fabsq(theta) + sqrtq(theta * theta + 1));
        const __float128 c = 1 / sqrtq(t * t + 1), s = t * c;
        for (int k = 0; k < n; ++k) {
          const __float128 akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const __float128 apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<__float128> d(n);
  for (int i = 0; i < n; ++i) d[i] = A(i, i);
  std::sort(d.begin(), d.end());
  return d;
}

PencilMatrices laplace_pencil(const GramMatrices& g) {
  return PencilMatrices(g, assemble_Q(g.spec(), CoefficientMatrix(g.spec().dim, g.spec().m)), std::nullopt);
}

}  // namespace

TEST(Eig, CholeskyExample) {
  Eigen::MatrixXd a(2, 2);
  a << 4, 2, 2, 3;
  const Eigen::MatrixXd l = cholesky(a);
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 1.0);
  EXPECT_NEAR(l(1, 1), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(l(0, 1), 0.0);
  Eigen::MatrixXd b(2, 2);
  b << 1, 2, 2, 1;
  EXPECT_THROW(cholesky(b), NotPositiveDefinite);
}

TEST(Eig, SymEigExample) {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 2;
  const SymEig e = sym_eig(a);
  EXPECT_NEAR(e.values[0], 1.0, 1e-15);
  EXPECT_NEAR(e.values[1], 3.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), std::sqrt(0.5), 1e-15);
  const SymEig d = sym_eig(Eigen::Vector3d(3, -1, 2).asDiagonal());
  EXPECT_EQ(d.values[0], -1.0);
  EXPECT_EQ(d.values[2], 3.0);
  EXPECT_EQ(d.sweeps, 0);
}

TEST(PropertyEig, JacobiMatchesCharacteristicRoots) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const Eigen::MatrixXd a = random_symmetric(4, rng);
    const SymEig e = sym_eig(a);
    const double scale = a.norm();
    const Eigen::Vector4d ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
    for (int i = 0; i < 4; ++i) {
      // Each value is a root of det(A - x I).
      const double det = (a - e.values[i] * Eigen::MatrixXd::Identity(4, 4)).determinant();
      ASSERT_LE(std::abs(det), 1e-9 * std::pow(scale, 4)) << t;
      ASSERT_NEAR(e.values[i], ref[i], 1e-9 * scale) << t;
    }
    ASSERT_NEAR(e.values.sum(), a.trace(), 1e-12 * scale);
    ASSERT_LE((a * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-12 * scale);
    ASSERT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-13);
  }
}

TEST(PropertyEig, JacobiMatchesQuadPrecision) {
  std::mt19937_64 rng(12);
  for (int n : {2, 7, 20, 50}) {
    const Eigen::MatrixXd a = random_symmetric(n, rng);
    const SymEig e = sym_eig(a);
    const std::vector<__float128> ref = quad_eigenvalues(a);
    for (int i = 0; i < n; ++i)
      EXPECT_NEAR(e.values[i], static_cast<double>(ref[i]), 1e-13 * a.norm()) << "n=" << n << " i=" << i;
  }
}

TEST(PropertyEig, RayleighRitzMonotoneInN) {
  for (int dim : {1, 2}) {
    std::vector<double> prev;
    for (int n = 3; n <= 9; ++n) {
      const GramMatrices g(BasisSpec{dim, 1, n, 0});
      EigOptions o;
      o.residual_bounds = false;
      const SpectrumSlice s = gen_eig_smallest(laplace_pencil(g), 3, o);
      for (int i = 0; i < std::min<int>(3, static_cast<int>(prev.size())); ++i)
        EXPECT_LE(s.pairs[i].value, prev[i] * (1 + 1e-12)) << "dim=" << dim << " n=" << n << " i=" << i;
      prev.clear();
      for (const auto& p : s.pairs) prev.push_back(p.value);
    }
  }
}

TEST(Eig, LaplaceSmallestEigenvalues) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const GramMatrices g1(BasisSpec{1, 1, 8, 0});
  const SpectrumSlice s1 = gen_eig_smallest(laplace_pencil(g1), 2);
  EXPECT_GE(s1.pairs[0].value, pi2);
  EXPECT_LE(s1.pairs[0].value, pi2 + 1e-6);
  EXPECT_GE(s1.pairs[1].value, 4 * pi2);
  EXPECT_LE(s1.pairs[1].value, 4 * pi2 + 1e-2);

  const GramMatrices g2(BasisSpec{2, 2, 8, 0});
  const SpectrumSlice s2 = gen_eig_smallest(laplace_pencil(g2), 4);
  // Two components: every eigenvalue appears twice.
  EXPECT_NEAR(s2.pairs[0].value, s2.pairs[1].value, 1e-9);
  EXPECT_GE(s2.pairs[0].value, 2 * pi2);
  EXPECT_LE(s2.pairs[0].value, 2 * pi2 + 1e-5);
  EXPECT_GE(s2.pairs[2].value, 5 * pi2);
}

TEST(Eig, BackendsAgreeAndVectorsAreMassOrthonormal) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> G;
  const BasisSpec s{2, 2, 5, 0};
  const GramMatrices g(s);
  CoefficientMatrix q(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q(a, b) = CoefficientField(3 * G(rng));
  const PencilMatrices p(g, assemble_Q(s, q), std::nullopt);
  EigOptions oj, ol;
  oj.backend = EigOptions::Backend::jacobi;
  ol.backend = EigOptions::Backend::lapack;
  const SpectrumSlice a = gen_eig_smallest(p, 6, oj), b = gen_eig_smallest(p, 6, ol);
  EXPECT_EQ(a.backend, "jacobi");
  EXPECT_EQ(b.backend.rfind("lapack", 0), 0u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(a.pairs[i].value, b.pairs[i].value, 1e-9 * (1 + std::abs(b.pairs[i].value)));
    EXPECT_LE(b.pairs[i].residual_bound.hi(), 1e-8 * (1 + std::abs(b.pairs[i].value)));
    for (int k = 0; k < 6; ++k) {
      const double ip = b.pairs[i].vector.dot(g.apply_mass(b.pairs[k].vector));
      EXPECT_NEAR(ip, i == k ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Eig, BackendNames) {
  EXPECT_EQ(parse_backend("jacobi"), EigOptions::Backend::jacobi);
  EXPECT_EQ(to_string(parse_backend("lapack")), "lapack");
  EXPECT_EQ(to_string(parse_backend("auto")), "auto");
  EXPECT_THROW(parse_backend("arpack"), std::invalid_argument);
}

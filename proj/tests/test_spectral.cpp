#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "invnorm/spectral.hpp"

using namespace invnorm;
using Big = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;
using Poly = std::vector<Big>;  // monomial coefficients

namespace {

Big binom(int n, int k) {
  Big r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Rodrigues: P_i(x) = sum_k (-1)^(i+k) C(i,k) C(i+k,k) x^k.
Poly rodrigues(int i) {
  Poly p(i + 1);
  for (int k = 0; k <= i; ++k) p[k] = ((i + k) % 2 ? -1 : 1) * binom(i, k) * binom(i + k, k);
  return p;
}

Poly derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, Big(0));
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<int>(k);
  return d;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, Big(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Big integrate01(const Poly& p) {
  Big s = 0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k] / static_cast<int>(k + 1);
  return s;
}

double eval(const Poly& p, double x) {
  Big s = 0;
  for (std::size_t k = p.size(); k-- > 0;) s = s * x + p[k];
  return static_cast<double>(s);
}

// psi_i = x(1-x) P_i' / (i(i+1)) in monomials.
Poly psi_poly(int i) {
  Poly w{Big(0), Big(1), Big(-1)};
  Poly p = multiply(w, derivative(rodrigues(i)));
  for (auto& c : p) c /= i * (i + 1);
  return p;
}

}  // namespace

TEST(Spectral, LegendreExamples) {
  EXPECT_DOUBLE_EQ(legendre_eval(0, 0.37), 1.0);
  EXPECT_NEAR(legendre_eval(1, 0.5), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(legendre_eval(2, 0.0), 1.0);
  for (int i = 0; i < 60; ++i) EXPECT_NEAR(legendre_eval(i, 1.0), 1.0, 1e-14);
}

TEST(Spectral, LegendreMatchesRodrigues) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i <= 30; ++i) {
    const Poly p = rodrigues(i), dp = derivative(p);
    for (int t = 0; t < 10; ++t) {
      const double x = U(rng);
      EXPECT_NEAR(legendre_eval(i, x), eval(p, x), 1e-12) << i;
      EXPECT_NEAR(legendre_deriv(i, x), eval(dp, x), 1e-10 * (1 + i * i)) << i;
    }
  }
}

TEST(Spectral, PsiExamples) {
  EXPECT_EQ(psi_eval(1, 0.0), 0.0);
  EXPECT_NEAR(psi_eval(1, 0.5), 0.25, 1e-16);
  EXPECT_NEAR(psi_eval(2, 0.25), -0.09375, 1e-16);
  EXPECT_THROW(psi_eval(0, 0.3), SpecError);
  EXPECT_THROW(psi_deriv(0, 0.3), SpecError);
}

TEST(Spectral, PsiMatchesRodriguesForm) {
  for (int i = 1; i <= 20; ++i) {
    const Poly p = psi_poly(i), d2 = derivative(derivative(p));
    for (double x : {0.1, 0.37, 0.5, 0.81}) {
      EXPECT_NEAR(psi_eval(i, x), eval(p, x), 1e-13);
      EXPECT_NEAR(psi_second(i, x), eval(d2, x), 1e-9 * (1 + i * i));
    }
  }
}

TEST(PropertySpectral, PsiDerivativeIsMinusLegendre) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 100; ++t) {
    const double x = U(rng);
    for (int i = 1; i <= 40; ++i) ASSERT_LE(std::abs(psi_deriv(i, x) + legendre_eval(i, x)), 1e-12) << i << " " << x;
  }
}

TEST(PropertySpectral, StiffnessIsDiagonal) {
  const Gram1D g = gram_1d(40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      const double expect = i == j ? 1.0 / (2 * (i + 1) + 1) : 0.0;
      ASSERT_NEAR(g.S(i, j), expect, 1e-13);
    }
}

TEST(Spectral, GramExamples) {
  const Gram1D g2 = gram_1d(2);
  EXPECT_NEAR(g2.S(0, 0), 1.0 / 3, 1e-15);
  EXPECT_NEAR(g2.S(1, 1), 1.0 / 5, 1e-15);
  EXPECT_EQ(g2.S(0, 1), 0.0);
  EXPECT_NEAR(gram_1d(1).M(0, 0), 1.0 / 30, 1e-16);
  const Gram1D g = gram_1d(12);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (std::abs(i - j) != 0 && std::abs(i - j) != 2) EXPECT_EQ(g.M(i, j), 0.0);
}

TEST(PropertySpectral, GramMatchesQuadratureOracle) {
  // Exact rational integration of the monomial expansions.
  const int n = 12;
  const Gram1D g = gram_1d(n);
  std::vector<Poly> psi, dpsi;
  for (int i = 1; i <= n; ++i) {
    psi.push_back(psi_poly(i));
    dpsi.push_back(derivative(psi.back()));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double m = static_cast<double>(integrate01(multiply(psi[i], psi[j])));
      const double s = static_cast<double>(integrate01(multiply(dpsi[i], dpsi[j])));
      const double sm = std::abs(g.M(i, i)), ss = std::abs(g.S(i, i));
      ASSERT_LE(std::abs(g.M(i, j) - m), 1e-12 * sm) << i << "," << j;
      ASSERT_LE(std::abs(g.S(i, j) - s), 1e-12 * ss) << i << "," << j;
    }
}

TEST(PropertySpectral, GramMatchesRawQuadrature) {
  const int n = 30;
  const Gram1D g = gram_1d(n);
  const BasisTable t = basis_table(n, gauss_rule(n + 1 + 5));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double m = 0, s = 0;
      for (int k = 0; k < t.rule.size(); ++k) {
        m += t.rule.weights[k] * t.psi(i, k) * t.psi(j, k);
        s += t.rule.weights[k] * t.dpsi(i, k) * t.dpsi(j, k);
      }
      ASSERT_LE(std::abs(g.M(i, j) - m), 1e-12 * g.M(i, i));
      ASSERT_LE(std::abs(g.S(i, j) - s), 1e-12 * g.S(i, i));
    }
}

TEST(Spectral, GaussRuleExamples) {
  const QuadratureRule r1 = gauss_rule(1);
  ASSERT_EQ(r1.size(), 1);
  EXPECT_DOUBLE_EQ(r1.nodes[0], 0.5);
  EXPECT_DOUBLE_EQ(r1.weights[0], 1.0);
  const QuadratureRule r2 = gauss_rule(2);
  EXPECT_NEAR(r2.nodes[0], 0.5 - std::sqrt(3.0) / 6, 1e-15);
  EXPECT_NEAR(r2.nodes[1], 0.5 + std::sqrt(3.0) / 6, 1e-15);
  EXPECT_NEAR(r2.weights[0], 0.5, 1e-15);
  const QuadratureRule r5 = gauss_rule(5);
  double s = 0;
  for (int k = 0; k < 5; ++k) s += r5.weights[k] * std::pow(r5.nodes[k], 9);
  EXPECT_NEAR(s, 0.1, 1e-14);
}

TEST(Spectral, GaussRuleExactness) {
  for (int n : {1, 3, 8, 20, 45, 90}) {
    const QuadratureRule r = gauss_rule(n);
    double wsum = 0;
    for (int k = 0; k < n; ++k) {
      EXPECT_GT(r.weights[k], 0);
      EXPECT_GT(r.nodes[k], 0);
      EXPECT_LT(r.nodes[k], 1);
      wsum += r.weights[k];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += r.weights[k] * std::pow(r.nodes[k], d);
      ASSERT_LE(std::abs(s - 1.0 / (d + 1)) * (d + 1), 1e-13) << n << " " << d;
    }
  }
}

TEST(Spectral, TensorIndexConvention) {
  const int n = 4;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n * n);
  c[2 + n * 1] = 1.0;  // psi_3(x) psi_2(y)
  const ScalarField f(2, n, c);
  EXPECT_NEAR(f.value(0.3, 0.8), psi_eval(3, 0.3) * psi_eval(2, 0.8), 1e-15);
  EXPECT_EQ(f.degree(), n + 1);
}

TEST(Spectral, FieldsVanishOnBoundary) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> G;
  const int n = 15;
  Eigen::VectorXd c(n * n);
  for (auto& v : c) v = G(rng);
  const ScalarField f(2, n, c);
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    EXPECT_NEAR(f.value(0.0, t), 0.0, 1e-14);
    EXPECT_NEAR(f.value(1.0, t), 0.0, 1e-14);
    EXPECT_NEAR(f.value(t, 0.0), 0.0, 1e-14);
    EXPECT_NEAR(f.value(t, 1.0), 0.0, 1e-14);
  }
}

TEST(Spectral, InnerProductExamples) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(9);
  c[0] = 1.0;
  const VectorField u({ScalarField(2, 3, c)});
  EXPECT_NEAR(inner_V(u, u), 1.0 / 45, 1e-15);
  EXPECT_NEAR(inner_X(u, u), 1.0 / 900, 1e-16);
  const VectorField z = VectorField::zero(BasisSpec{2, 1, 3, 0});
  EXPECT_EQ(inner_X(z, z), 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> G;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd r(9);
    for (auto& v : r) v = G(rng);
    const VectorField w({ScalarField(2, 3, r)});
    EXPECT_GT(inner_X(w, w), 0.0);
  }
}

TEST(Spectral, MismatchedFieldsRejected) {
  const VectorField a = VectorField::zero(BasisSpec{2, 1, 3, 0});
  const VectorField b = VectorField::zero(BasisSpec{2, 1, 4, 0});
  EXPECT_THROW(inner_X(a, b), SpecError);
  EXPECT_THROW(inner_V(a, b), SpecError);
}

TEST(Spectral, LaplacianOfPsi1) {
  const BasisTable t = basis_table(1, gauss_rule(4));
  const ScalarField u(1, 1, Eigen::VectorXd::Ones(1));
  const GridField l = laplacian(u, t);
  for (Eigen::Index k = 0; k < l.values.size(); ++k) EXPECT_NEAR(l.values(k), 2.0, 1e-13);
}

TEST(Spectral, GreenIdentity) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> G;
  for (int dim : {1, 2}) {
    const int n = 9;
    const int size = dim == 1 ? n : n * n;
    const BasisTable t = basis_table(n, gauss_rule(quad_points_for_degree(2 * (n + 1))));
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd a(size), b(size);
      for (auto& v : a) v = G(rng);
      for (auto& v : b) v = G(rng);
      const ScalarField u(dim, n, a), v(dim, n, b);
      const double lhs = inner_V(VectorField({u}), VectorField({v}));
      const double rhs = grid_inner(laplacian(u, t), to_grid(v, t), t.rule, dim);
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::abs(lhs) + 1e-14);
    }
  }
}

TEST(Spectral, BasisSpecValidation) {
  EXPECT_THROW((BasisSpec{3, 1, 4, 0}).validate(), SpecError);
  EXPECT_THROW((BasisSpec{2, 0, 4, 0}).validate(), SpecError);
  EXPECT_THROW((BasisSpec{2, 1, 0, 0}).validate(), SpecError);
  const BasisSpec s{2, 3, 5, 0};
  EXPECT_EQ(s.size(), 3 * 25);
}

#include "invnorm/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "invnorm/assembly.hpp"
#include "invnorm/certify.hpp"
#include "invnorm/eig.hpp"
#include "invnorm/liu.hpp"
#include "invnorm/tlg.hpp"

namespace invnorm {

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows{
      {60, 7.88e-3, 0.0399, 5.8616931651409078, 5.8616932446435773, -26.963087160457065},
      {80, 5.99e-3, 0.0303, 5.8616930544573868, 5.8616933569412915, -14.900551378456357},
      {100, 4.84e-3, 0.0245, 5.8616927624274461, 5.8616936483586893, -8.2725800704491519},
  };
  return rows;
}

ReferenceNorms reference_norms() { return {155.29112928765162, 1e-4, 308.06051565984086, 82.580303007092866}; }

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

template <class F>
CheckResult timed(std::string id, std::string name, F&& f) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    f(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Constants reference_constants(const ReferenceRow& row) {
  const ReferenceNorms rn = reference_norms();
  Constants c;
  c.C_p = poincare_constant(2);
  c.C_h = Interval(row.C_h);
  c.ch_provenance = ChMode::table;
  c.norm_Q = Interval(rn.norm_Q);
  c.norm_QQstar = Interval(rn.norm_QQstar);
  c.sigma = select_sigma(c.norm_QQstar, rn.sigma_margin);
  c.norm_shift = Interval(rn.norm_shift);
  c.norm_provenance = "user";
  c.validate();
  return c;
}

PipelineOptions oracle_options(int n, bool corrupt) {
  PipelineOptions o;
  o.n_cert = n;
  o.n_solve = n;
  o.ch_mode = ChMode::heuristic;
  o.corrupt_gram = corrupt;
  return o;
}

}  // namespace

CheckResult check_formula_reproduction() {
  return timed("1", "formula reproduction (reference constants)", [](CheckResult& r) {
    r.pass = true;
    for (const ReferenceRow& row : reference_rows()) {
      const Constants c = reference_constants(row);
      const Interval lam(row.lambda_lo, row.lambda_hi);
      const Interval C = cms(c, lam);
      const Interval low = liu_lower(lam, c.sigma, C);
      const bool ok = std::abs(C.hi() - row.C_Ms) <= 5e-4 && std::abs(low.lo() - row.liu_lower) <= 0.3;
      r.pass = r.pass && ok;
      r.detail += fmt("N=%g: C_Ms=%.6f lower=%.6f; ", row.n, C.hi(), low.lo());
    }
  });
}

CheckResult check_final_bound() {
  return timed("2", "final bound reproduction", [](CheckResult& r) {
    const auto b = inverse_norm_bound(Interval(5.8616914678651141));
    if (!b) throw std::logic_error("no bound for a positive eigenvalue");
    r.pass = b->hi() <= 0.4131 && b->hi() >= 0.41305;
    r.detail = fmt("1/sqrt(5.8616914678651141) <= %.10f, required in [0.41305, 0.4131]", b->hi());
  });
}

CheckResult check_interval_oracle_1d(bool corrupt) {
  return timed("3", "1D constant-coefficient oracle q=5", [corrupt](CheckResult& r) {
    const double exact = std::numbers::pi / (std::numbers::pi * std::numbers::pi - 5.0);
    const PipelineResult p = run_pipeline(constant_q(5.0, 1, 1), oracle_options(20, corrupt));
    if (!p.certificate.inv_norm_upper) throw std::runtime_error("no certified bound");
    const double b = p.certificate.inv_norm_upper->hi();
    r.pass = b >= 0.6452 && b <= 0.68;
    r.detail = fmt("bound %.8f, exact %.8f, required in [0.6452, 0.68]", b, exact);
  });
}

CheckResult check_zero_perturbation_2d(bool corrupt) {
  return timed("4", "2D zero-perturbation oracle", [corrupt](CheckResult& r) {
    const double exact = 1.0 / (std::sqrt(2.0) * std::numbers::pi);
    const PipelineResult p = run_pipeline(constant_q(0.0, 2, 1), oracle_options(10, corrupt));
    if (!p.certificate.inv_norm_upper) throw std::runtime_error("no certified bound");
    const double b = p.certificate.inv_norm_upper->hi();
    r.pass = b >= 0.22508 && b <= 0.2302;
    r.detail = fmt("bound %.8f, exact %.8f, required in [0.22508, 0.2302]", b, exact);
  });
}

CheckResult check_gram_stage(bool corrupt) {
  return timed("G", "Gram assembly quadrature self-check", [corrupt](CheckResult& r) {
    double worst = 0.0;
    for (int dim : {1, 2})
      for (int n : {5, 20}) {
        GramMatrices g(BasisSpec{dim, 1, n, 0});
        if (corrupt) g.corrupt_for_testing();
        worst = std::max(worst, g.quadrature_defect());
      }
    r.pass = worst <= 1e-12;
    r.detail = fmt("[assemble] largest relative defect %.3g (limit 1e-12)", worst);
  });
}

CheckResult check_quick_properties() {
  return timed("P", "quick properties (Jacobi, Temple, Liu left <= lambda_h)", [](CheckResult& r) {
    std::string fails;
    // Jacobi on tridiag(-1, 2, -1): eigenvalues 2 - 2 cos(k pi / 5).
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      t(i, i) = 2;
      if (i + 1 < 4) t(i, i + 1) = t(i + 1, i) = -1;
    }
    const SymEig e = sym_eig(t);
    for (int k = 1; k <= 4; ++k)
      if (std::abs(e.values[k - 1] - (2 - 2 * std::cos(k * std::numbers::pi / 5))) > 1e-9) fails += "jacobi ";
    // Lehmann with one trial equals Temple.
    Eigen::MatrixXd S = Eigen::Vector2d(1, 3).asDiagonal();
    Eigen::MatrixXd u(2, 1);
    u << 1, 0.1;
    const RefinedBound rb = lehmann_bounds(lehmann_matrices(S, u), Interval(2.0), 2);
    const double rr = 1.03 / 1.01, s2 = 1.09 / 1.01;
    const double temple = (2 * rr - s2) / (2 - rr);
    if (std::abs(rb.lambda1_lower.mid() - temple) > 1e-12) fails += "temple ";
    // Left Liu bound never exceeds the discrete eigenvalue.
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 10000; ++i) {
      const double sigma = 1e-3 + 200 * U(rng);
      const double lam = -sigma + 1e-6 + 500 * U(rng);
      const double C = 0.1 * U(rng);
      if (liu_lower(Interval(lam), Interval(sigma), Interval(C)).hi() > lam) {
        fails += "liu ";
        break;
      }
    }
    r.pass = fails.empty();
    r.detail = r.pass ? "all hold" : "failed: " + fails;
  });
}

std::vector<CheckResult> run_selftest(bool corrupt) {
  return {check_formula_reproduction(),      check_final_bound(),
          check_interval_oracle_1d(corrupt), check_zero_perturbation_2d(corrupt),
          check_gram_stage(corrupt),         check_quick_properties()};
}

std::string format(const CheckResult& r) {
  char t[32];
  std::snprintf(t, sizeof t, "%.2fs", r.seconds);
  return std::string(r.pass ? "PASS " : "FAIL ") + r.id + " " + r.name + " (" + r.detail + ") [" + t + "]";
}

}  // namespace invnorm

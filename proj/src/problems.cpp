#include "invnorm/problems.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "linalg.hpp"

namespace invnorm {

ProblemSpec lotka_volterra() {
  ProblemSpec p;
  p.name = "lotka-volterra";
  p.descriptor = "-Lap u = 6u - u^2 + 2uv, -Lap v = 4v + 4uv - v^2";
  p.dim = 2;
  p.m = 2;
  p.f_degree = 2;
  p.f = [](const GridVectorField& u, const QuadratureRule&) {
    const Eigen::ArrayXXd a = u[0].values.array(), b = u[1].values.array();
    GridVectorField out(2);
    out[0].values = (6.0 * a - a * a + 2.0 * a * b).matrix();
    out[1].values = (4.0 * b + 4.0 * a * b - b * b).matrix();
    return out;
  };
  p.jacobian = [](const VectorField& u) {
    if (u.m() != 2) throw ProblemError("Lotka-Volterra needs two components");
    const int dim = u.dim(), n = u.n();
    const Eigen::VectorXd& cu = u[0].coeffs();
    const Eigen::VectorXd& cv = u[1].coeffs();
    CoefficientMatrix q(dim, 2);
    q(0, 0) = CoefficientField(6.0, ScalarField(dim, n, -2.0 * cu + 2.0 * cv));
    q(0, 1) = CoefficientField(0.0, ScalarField(dim, n, 2.0 * cu));
    q(1, 0) = CoefficientField(0.0, ScalarField(dim, n, 4.0 * cv));
    q(1, 1) = CoefficientField(4.0, ScalarField(dim, n, 4.0 * cu - 2.0 * cv));
    return q;
  };
  return p;
}

ProblemSpec constant_q(double c, int dim, int m) {
  ProblemSpec p;
  p.name = "constant-q";
  std::ostringstream d;
  d << std::setprecision(17) << "c=" << c << " dim=" << dim << " m=" << m;
  p.descriptor = d.str();
  p.dim = dim;
  p.m = m;
  p.f_degree = 1;
  p.f = [c](const GridVectorField& u, const QuadratureRule&) {
    GridVectorField out = u;
    for (auto& g : out) g.values *= c;
    return out;
  };
  p.fixed_q = CoefficientMatrix::scaled_identity(dim, m, c);
  p.jacobian = [q = *p.fixed_q](const VectorField&) { return q; };
  return p;
}

ProblemSpec custom_coefficients(CoefficientMatrix q, const std::string& descriptor) {
  ProblemSpec p;
  p.name = "custom";
  p.descriptor = descriptor;
  p.dim = q.dim();
  p.m = q.m();
  p.f_degree = 1;
  p.x_degree = q.degree();
  p.f = [q](const GridVectorField& u, const QuadratureRule& rule) {
    const int m = q.m();
    GridVectorField out(m);
    for (int a = 0; a < m; ++a) {
      out[a].values = Eigen::MatrixXd::Zero(u[0].values.rows(), u[0].values.cols());
      for (int b = 0; b < m; ++b)
        out[a].values += q(a, b).to_grid(rule, q.dim()).values.cwiseProduct(u[b].values);
    }
    return out;
  };
  p.fixed_q = q;
  p.jacobian = [q](const VectorField&) { return q; };
  return p;
}

ProblemSpec manufactured(const VectorField& u_star) {
  ProblemSpec p;
  p.name = "manufactured";
  p.descriptor = "f = -Lap u*";
  p.dim = u_star.dim();
  p.m = u_star.m();
  p.f_degree = 0;
  p.x_degree = u_star.n() + 1;
  p.f = [u_star](const GridVectorField&, const QuadratureRule& rule) {
    const BasisTable t = basis_table(u_star.n(), rule);
    GridVectorField out;
    for (int a = 0; a < u_star.m(); ++a) out.push_back(laplacian(u_star[a], t));
    return out;
  };
  const int dim = p.dim, m = p.m;
  p.jacobian = [dim, m](const VectorField&) { return CoefficientMatrix(dim, m); };
  return p;
}

Eigen::VectorXd galerkin_residual(const ProblemSpec& p, const GramMatrices& gram, const VectorField& u) {
  const BasisSpec& spec = gram.spec();
  const int deg = p.f_degree * (spec.n + 1) + p.x_degree + (spec.n + 1);
  const BasisTable t = basis_table(spec.n, gauss_rule(quad_points_for_degree(deg)));
  GridVectorField U;
  for (int a = 0; a < spec.m; ++a) U.push_back(to_grid(u[a], t));
  const GridVectorField F = p.f(U, t.rule);
  const int L = spec.local_size();
  Eigen::VectorXd r = gram.apply_D(u.stacked());
  for (int a = 0; a < spec.m; ++a) r.segment(a * L, L) -= load(F[a], t, spec.dim);
  return r;
}

ApproxSolution newton_solve(const ProblemSpec& p, int n_solve, const VectorField& init, const NewtonOptions& opt) {
  BasisSpec spec{p.dim, p.m, n_solve, 0};
  spec.validate();
  if (init.m() != p.m || init.dim() != p.dim) throw ProblemError("initial guess does not match the problem");
  const GramMatrices gram(spec);
  const Eigen::MatrixXd D = gram.D_dense();
  ApproxSolution sol;
  VectorField u = init.n() == n_solve ? init : init.resized(n_solve);
  Eigen::VectorXd F = galerkin_residual(p, gram, u);
  double r = F.norm();
  sol.log.push_back({0, r, 0.0});
  for (int it = 1; it <= opt.max_iter && !(r < opt.tol); ++it) {
    Eigen::MatrixXd J = D - assemble_Q(spec, p.jacobian(u)).mat;
    Eigen::VectorXd delta = -F;
    if (lapack::gesv(spec.size(), J.data(), delta.data(), 1) != 0) throw ProblemError("singular Newton Jacobian");
    double step = opt.damping;
    bool accepted = false;
    const Eigen::VectorXd c = u.stacked();
    while (step >= 1e-6) {
      VectorField trial = VectorField::from_stacked(spec, c + step * delta);
      Eigen::VectorXd Ft = galerkin_residual(p, gram, trial);
      const double rt = Ft.norm();
      if (rt < r) {
        u = std::move(trial);
        F = std::move(Ft);
        r = rt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled: residual cannot be decreased along the Newton direction
    sol.log.push_back({it, r, step});
  }
  sol.u = std::move(u);
  sol.residual = r;
  sol.converged = r < opt.tol;
  return sol;
}

VectorField default_start(int dim, int n, const std::vector<double>& alpha) {
  std::vector<ScalarField> comps;
  for (double a : alpha) {
    ScalarField f(dim, n);
    f.coeffs()[0] = a * (dim == 2 ? 16.0 : 4.0);  // psi_1 = x(1-x)
    comps.push_back(std::move(f));
  }
  return VectorField(std::move(comps));
}

double interior_mean(const VectorField& u) {
  // Only psi_1 has a non-zero integral (1/6 per direction).
  double s = 0.0;
  const double w = u.dim() == 2 ? 1.0 / 36.0 : 1.0 / 6.0;
  for (int a = 0; a < u.m(); ++a) s += u[a].coeffs()[0] * w;
  return s;
}

namespace {

std::string alpha_label(const std::vector<double>& a) {
  std::ostringstream os;
  os << "alpha=(";
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ")";
  return os.str();
}

}  // namespace

ApproxSolution solve_multistart(const ProblemSpec& p, int n_solve, const NewtonOptions& opt) {
  const int nc = std::min(opt.coarse_n, n_solve);
  const int na = static_cast<int>(opt.amplitudes.size());
  if (na == 0) throw ProblemError("empty amplitude list");
  long combos = 1;
  for (int a = 0; a < p.m; ++a) combos *= na;

  struct Run {
    ApproxSolution sol;
    std::vector<double> alpha;
  };
  std::vector<Run> converged;
  for (long k = 0; k < combos; ++k) {
    std::vector<double> alpha(p.m);
    long rem = k;
    for (int a = 0; a < p.m; ++a) {
      alpha[a] = opt.amplitudes[rem % na];
      rem /= na;
    }
    ApproxSolution s;
    try {
      s = newton_solve(p, nc, default_start(p.dim, nc, alpha), opt);
    } catch (const ProblemError&) {
      continue;
    }
    if (s.converged) converged.push_back({std::move(s), alpha});
  }
  if (converged.empty()) throw ProblemError("no Newton start converged");

  // Distinct branches.
  std::vector<std::string> branches;
  std::vector<Eigen::VectorXd> seen;
  for (const Run& r : converged) {
    const Eigen::VectorXd c = r.sol.u.stacked();
    bool dup = false;
    for (const auto& s : seen)
      if ((s - c).lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, c.lpNorm<Eigen::Infinity>())) dup = true;
    if (dup) continue;
    seen.push_back(c);
    std::ostringstream os;
    os << std::setprecision(10) << alpha_label(r.alpha) << " mean=" << interior_mean(r.sol.u);
    branches.push_back(os.str());
  }

  // Every converged run meets the residual tolerance, so runs tie on the
  // residual and the largest interior mean decides.
  const Run* best = &converged[0];
  for (const Run& r : converged)
    if (interior_mean(r.sol.u) > interior_mean(best->sol.u)) best = &r;

  ApproxSolution out = nc == n_solve ? best->sol : newton_solve(p, n_solve, best->sol.u.resized(n_solve), opt);
  if (!out.converged) throw ProblemError("Newton polish at the solve size did not converge");
  out.start = alpha_label(best->alpha) + " coarse N=" + std::to_string(nc);
  out.branches = std::move(branches);
  return out;
}

void save_solution(const VectorField& u, const std::string& path) {
  nlohmann::json j;
  j["dim"] = u.dim();
  j["m"] = u.m();
  j["n"] = u.n();
  j["index_order"] = "i1 + n*i2, psi_(i+1)";
  for (int a = 0; a < u.m(); ++a) {
    const auto& c = u[a].coeffs();
    j["components"].push_back(std::vector<double>(c.data(), c.data() + c.size()));
  }
  std::ofstream os(path);
  if (!os) throw ProblemError("cannot write solution file " + path);
  os << std::setprecision(17) << j.dump(1) << '\n';
}

VectorField load_solution(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ProblemError("cannot read solution file " + path);
  nlohmann::json j;
  try {
    is >> j;
    const int dim = j.at("dim"), m = j.at("m"), n = j.at("n");
    const auto& comps = j.at("components");
    if (static_cast<int>(comps.size()) != m) throw ProblemError("solution file component count mismatch");
    std::vector<ScalarField> fields;
    for (const auto& c : comps) {
      std::vector<double> v = c.get<std::vector<double>>();
      fields.emplace_back(dim, n, Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return VectorField(std::move(fields));
  } catch (const nlohmann::json::exception& e) {
    throw ProblemError(std::string("malformed solution file: ") + e.what());
  } catch (const SpecError& e) {
    throw ProblemError(std::string("malformed solution file: ") + e.what());
  }
}

void dump_grid(const VectorField& u, const std::string& path, int points) {
  std::ofstream os(path);
  if (!os) throw ProblemError("cannot write grid file " + path);
  os << std::setprecision(10);
  for (int i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / (points - 1);
    if (u.dim() == 1) {
      os << x;
      for (int a = 0; a < u.m(); ++a) os << ' ' << u[a].value(x);
      os << '\n';
      continue;
    }
    for (int k = 0; k < points; ++k) {
      const double y = static_cast<double>(k) / (points - 1);
      os << x << ' ' << y;
      for (int a = 0; a < u.m(); ++a) os << ' ' << u[a].value(x, y);
      os << '\n';
    }
    os << '\n';
  }
}

}  // namespace invnorm

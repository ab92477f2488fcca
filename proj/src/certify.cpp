#include "invnorm/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "invnorm/assembly.hpp"
#include "invnorm/tlg.hpp"
#include "linalg.hpp"

namespace invnorm {

using nlohmann::json;

RefineMode parse_refine_mode(const std::string& s) {
  if (s == "auto") return RefineMode::automatic;
  if (s == "always") return RefineMode::always;
  if (s == "never") return RefineMode::never;
  throw std::invalid_argument("unknown refinement mode '" + s + "'");
}

RhoMode parse_rho_mode(const std::string& s) {
  if (s == "gap-top") return RhoMode::gap_top;
  if (s == "nu") return RhoMode::nu;
  throw std::invalid_argument("unknown rho mode '" + s + "'");
}

std::string to_string(RefineMode m) {
  switch (m) {
    case RefineMode::always:
      return "always";
    case RefineMode::never:
      return "never";
    case RefineMode::automatic:
      break;
  }
  return "auto";
}

std::string to_string(RhoMode m) { return m == RhoMode::nu ? "nu" : "gap-top"; }

std::optional<Interval> inverse_norm_bound(const Interval& lambda_lower) {
  if (!(lambda_lower.lo() > 0)) return std::nullopt;
  return Interval(1.0) / sqrt(lambda_lower);
}

void set_threads(int n) { lapack::set_threads(n); }

int exit_code(const Certificate& c) { return c.certified ? 0 : 2; }

bool Certificate::same_result(const Certificate& o) const {
  Certificate a = *this, b = o;
  a.timings.clear();
  b.timings.clear();
  return a == b;
}

void check_dense_memory(long order, int matrices) {
  const double need = static_cast<double>(order) * order * 8.0 * matrices;
  double avail = static_cast<double>(sysconf(_SC_PHYS_PAGES)) * static_cast<double>(sysconf(_SC_PAGE_SIZE));
  for (const char* path : {"/sys/fs/cgroup/memory.max", "/sys/fs/cgroup/memory/memory.limit_in_bytes"}) {
    std::ifstream is(path);
    double v = 0;
    if (is >> v && v > 0) avail = std::min(avail, v);
  }
  if (need > 0.9 * avail) {
    std::ostringstream os;
    os << "dense storage for order " << order << " needs about " << need / 1e9 << " GB, only " << avail / 1e9
       << " GB available";
    throw std::runtime_error(os.str());
  }
}

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Runs f, rethrowing any failure tagged with the stage name.
template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

Interval user_norm(const char* what, std::optional<double> user, const SupNormResult& computed) {
  if (!user) return Interval(computed.bound.hi());
  if (!(*user >= computed.bound.hi()))
    throw std::runtime_error(std::string("user bound for ") + what + " is below the computed bound " +
                             std::to_string(computed.bound.hi()));
  return Interval(*user);
}

}  // namespace

std::string certificate_hash(const ProblemSpec& problem, const PipelineOptions& opt) {
  std::ostringstream os;
  os.precision(17);
  os << problem.name << '|' << problem.descriptor << '|' << problem.dim << '|' << problem.m << '|' << opt.n_solve
     << '|' << opt.n_cert << '|' << opt.k << '|' << opt.sigma_margin << '|' << to_string(opt.ch_mode) << '|'
     << opt.ch_value.value_or(-1) << '|' << opt.quad_order << '|' << opt.float_only << '|'
     << opt.norm_Q.value_or(-1) << '|' << opt.norm_QQstar.value_or(-1) << '|' << opt.norm_shift.value_or(-1) << '|'
     << to_string(opt.refine) << '|' << to_string(opt.rho) << '|' << opt.seed;
  if (opt.solution)
    for (int a = 0; a < opt.solution->m(); ++a)
      for (double c : (*opt.solution)[a].coeffs()) os << '|' << c;
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineResult run_pipeline(const ProblemSpec& problem, const PipelineOptions& opt) {
  PipelineResult out;
  Certificate& c = out.certificate;
  Stopwatch sw;
  c.problem = problem.name;
  c.descriptor = problem.descriptor;
  c.hash = certificate_hash(problem, opt);
  c.dim = problem.dim;
  c.m = problem.m;
  c.n_solve = opt.n_solve;
  c.n_cert = opt.n_cert;
  c.k = opt.k;
  c.seed = opt.seed;
  c.rigor_level = opt.float_only ? "float-only" : "interval+residual";
  if (opt.k < 1) throw StageError("options", "k must be positive");

  // Approximate solution and linearization coefficients.
  CoefficientMatrix q = stage("newton", [&] {
    if (problem.fixed_q) {
      c.newton_start = "fixed coefficients";
      return *problem.fixed_q;
    }
    if (opt.solution) {
      out.solution.u = *opt.solution;
      BasisSpec s{problem.dim, problem.m, opt.solution->n(), 0};
      out.solution.residual = galerkin_residual(problem, GramMatrices(s), out.solution.u).norm();
      out.solution.converged = out.solution.residual < opt.newton.tol;
      out.solution.start = "pinned solution";
    } else {
      out.solution = solve_multistart(problem, opt.n_solve, opt.newton);
    }
    c.newton_start = out.solution.start;
    c.newton_residual = out.solution.residual;
    c.newton_iterations = out.solution.log.empty() ? 0 : static_cast<int>(out.solution.log.size()) - 1;
    c.branches = out.solution.branches;
    return problem.jacobian(out.solution.u);
  });
  c.timings.emplace_back("newton", sw.lap());

  // Sup norms and the shift.
  Constants k;
  stage("norms", [&] {
    const SupNormResult nq = sup_operator_norm(q, NormTarget::plain(), opt.sup);
    const SupNormResult ns = sup_operator_norm(q, NormTarget::symmetric_part(), opt.sup);
    k.norm_Q = user_norm("||Q||", opt.norm_Q, nq);
    k.norm_QQstar = user_norm("||Q+Q*||", opt.norm_QQstar, ns);
    k.sigma = select_sigma(k.norm_QQstar, opt.sigma_margin);
    const SupNormResult nsh = sup_operator_norm(q, NormTarget::shifted(k.sigma.lo()), opt.sup);
    k.norm_shift = user_norm("||sigma-(Q+Q*)||", opt.norm_shift, nsh);
    const bool user = opt.norm_Q || opt.norm_QQstar || opt.norm_shift;
    k.norm_provenance = user ? "user" : "computed";
    c.norms_coarse = nq.coarse || ns.coarse || nsh.coarse;
    return 0;
  });
  c.timings.emplace_back("norms", sw.lap());

  stage("constants", [&] {
    k.C_p = poincare_constant(problem.dim);
    const RitzConstant ch = ritz_error_constant(opt.n_cert, opt.ch_mode, opt.ch_value);
    k.C_h = ch.value;
    k.ch_provenance = ch.provenance;
    k.validate();
    return 0;
  });
  c.C_p = k.C_p;
  c.C_h = k.C_h;
  c.ch_provenance = to_string(k.ch_provenance);
  c.sigma = k.sigma;
  c.norm_Q = k.norm_Q;
  c.norm_QQstar = k.norm_QQstar;
  c.norm_shift = k.norm_shift;
  c.norm_provenance = k.norm_provenance;
  c.timings.emplace_back("constants", sw.lap());

  const BasisSpec spec{problem.dim, problem.m, opt.n_cert, opt.quad_order};
  GramMatrices gram;
  PencilMatrices pencil;
  stage("assemble", [&] {
    spec.validate();
    check_dense_memory(spec.size(), 2);
    gram = GramMatrices(spec);
    if (opt.corrupt_gram) gram.corrupt_for_testing();
    if (gram.quadrature_defect() > 1e-12)
      throw std::runtime_error("Gram matrices fail the quadrature self-check (relative defect " +
                               std::to_string(gram.quadrature_defect()) + ")");
    QMatrix qm = assemble_Q(spec, q);
    c.q_symmetry_defect = qm.symmetry_defect;
    pencil = PencilMatrices(gram, std::move(qm), k.sigma.lo());
    return 0;
  });
  c.gram_quadrature_defect = gram.quadrature_defect();
  c.timings.emplace_back("assemble", sw.lap());

  EigOptions eo = opt.eig;
  eo.residual_bounds = !opt.float_only;
  const SpectrumSlice slice = stage("eig", [&] { return gen_eig_smallest(pencil, opt.k, eo); });
  c.backend = slice.backend;
  for (const auto& p : slice.pairs) c.spectrum.push_back({p.value, p.residual_bound.hi()});
  c.timings.emplace_back("eig", sw.lap());

  EigBounds bounds;
  std::optional<GapCertificate> gap;
  stage("liu", [&] {
    c.C_Ms = cms(k, slice.pairs[0].enclosure());
    bounds = lower_upper_bounds(slice, k, c.C_Ms);
    gap = find_gap(bounds);
    return 0;
  });
  for (const auto& b : bounds.items) c.bounds.push_back({b.lambda_h, b.lower, b.upper});
  if (gap) c.gap = GapEntry{gap->j, gap->j_cluster, gap->nu, gap->lower_j};
  c.timings.emplace_back("liu", sw.lap());

  const Interval liu1 = bounds.items[0].lower;
  const bool need = opt.refine == RefineMode::always || (opt.refine == RefineMode::automatic && !(liu1.lo() > 0));
  std::optional<Interval> lambda = liu1;
  c.lambda_source = "liu";
  if (need) {
    if (!gap) {
      lambda.reset();
      c.lambda_source.clear();
    } else {
      stage("tlg", [&] {
        const int j = gap->j;
        const int ntr = std::min(opt.k, j + 2);
        std::vector<VectorField> trials;
        for (int i = 0; i < ntr; ++i) trials.push_back(VectorField::from_stacked(spec, slice.pairs[i].vector));
        const LehmannMatrices mats = lehmann_matrices(trials, q, gram, &pencil);
        c.form_consistency = mats.form_consistency;
        c.lehmann_symmetry_defect = mats.symmetry_defect;
        const Interval rho = opt.rho == RhoMode::nu ? Interval(gap->nu.hi()) : Interval(gap->lower_j.lo());
        const RefinedBound r = lehmann_bounds(mats, rho, j, opt.strict_tol);
        c.refined = RefinedEntry{r.rho, r.tau, r.lower, r.lambda1_lower, r.ritz, ntr};
        if (r.lambda1_lower.lo() > lambda->lo()) {
          lambda = r.lambda1_lower;
          c.lambda_source = "lehmann";
        }
        return 0;
      });
      c.timings.emplace_back("tlg", sw.lap());
    }
  }

  c.lambda_lower = lambda;
  if (lambda) c.inv_norm_upper = inverse_norm_bound(*lambda);
  c.certified = c.inv_norm_upper.has_value();
  c.status = c.certified ? "certified" : (lambda ? "not-positive" : "no-gap");
  if (opt.float_only)
    c.guarantee = "not-guaranteed";
  else if (k.ch_provenance == ChMode::table)
    c.guarantee = "guaranteed";
  else
    c.guarantee = "guaranteed-modulo-C_h";
  c.timings.emplace_back("final", sw.lap());
  return out;
}

// JSON

namespace {

json iv(const Interval& x) { return json::array({x.lo(), x.hi()}); }
Interval iv(const json& j) { return Interval(j.at(0).get<double>(), j.at(1).get<double>()); }

json ivs(const std::vector<Interval>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(iv(x));
  return a;
}
std::vector<Interval> ivs(const json& j) {
  std::vector<Interval> v;
  for (const auto& x : j) v.push_back(iv(x));
  return v;
}

}  // namespace

std::string to_json(const Certificate& c) {
  json j;
  j["problem"] = {{"name", c.problem}, {"descriptor", c.descriptor}, {"hash", c.hash}, {"dim", c.dim}, {"m", c.m}};
  j["discretization"] = {{"n_solve", c.n_solve}, {"n_cert", c.n_cert}, {"k", c.k}};
  j["seed"] = c.seed;
  j["solution"] = {{"start", c.newton_start},
                   {"residual", c.newton_residual},
                   {"iterations", c.newton_iterations},
                   {"branches", c.branches}};
  j["constants"] = {{"C_p", iv(c.C_p)},
                    {"C_h", iv(c.C_h)},
                    {"C_h_provenance", c.ch_provenance},
                    {"sigma", iv(c.sigma)},
                    {"norm_Q", iv(c.norm_Q)},
                    {"norm_QQstar", iv(c.norm_QQstar)},
                    {"norm_shift", iv(c.norm_shift)},
                    {"norm_provenance", c.norm_provenance},
                    {"norms_coarse", c.norms_coarse},
                    {"C_Ms", iv(c.C_Ms)}};
  json sp = json::array();
  for (const auto& s : c.spectrum) sp.push_back({{"value", s.value}, {"eta", s.eta}});
  j["spectrum"] = {{"backend", c.backend}, {"pairs", sp}};
  json bd = json::array();
  for (const auto& b : c.bounds)
    bd.push_back({{"lambda_h", iv(b.lambda_h)}, {"lower", iv(b.lower)}, {"upper", iv(b.upper)}});
  j["bounds"] = bd;
  if (c.gap)
    j["gap"] = {{"j", c.gap->j}, {"j_cluster", c.gap->j_cluster}, {"nu", iv(c.gap->nu)}, {"lower_j", iv(c.gap->lower_j)}};
  else
    j["gap"] = "NotFound";
  if (c.refined)
    j["refined"] = {{"rho", iv(c.refined->rho)},       {"tau", ivs(c.refined->tau)},
                    {"lower", ivs(c.refined->lower)},  {"lambda1_lower", iv(c.refined->lambda1_lower)},
                    {"ritz", c.refined->ritz},         {"trials", c.refined->trials}};
  else
    j["refined"] = nullptr;
  j["lambda_lower"] = c.lambda_lower ? iv(*c.lambda_lower) : json(nullptr);
  j["lambda_source"] = c.lambda_source;
  j["inv_norm_upper"] = c.inv_norm_upper ? iv(*c.inv_norm_upper) : json(nullptr);
  j["certified"] = c.certified;
  j["status"] = c.status;
  j["rigor_level"] = c.rigor_level;
  j["guarantee"] = c.guarantee;
  j["diagnostics"] = {{"gram_quadrature_defect", c.gram_quadrature_defect},
                      {"q_symmetry_defect", c.q_symmetry_defect},
                      {"form_consistency", c.form_consistency},
                      {"lehmann_symmetry_defect", c.lehmann_symmetry_defect}};
  json t = json::array();
  for (const auto& [name, s] : c.timings) t.push_back({{"stage", name}, {"seconds", s}});
  j["timings"] = t;
  return j.dump(2);
}

Certificate certificate_from_json(const std::string& text) {
  Certificate c;
  try {
    const json j = json::parse(text);
    const json& p = j.at("problem");
    c.problem = p.at("name");
    c.descriptor = p.at("descriptor");
    c.hash = p.at("hash");
    c.dim = p.at("dim");
    c.m = p.at("m");
    const json& d = j.at("discretization");
    c.n_solve = d.at("n_solve");
    c.n_cert = d.at("n_cert");
    c.k = d.at("k");
    c.seed = j.at("seed");
    const json& s = j.at("solution");
    c.newton_start = s.at("start");
    c.newton_residual = s.at("residual");
    c.newton_iterations = s.at("iterations");
    c.branches = s.at("branches").get<std::vector<std::string>>();
    const json& k = j.at("constants");
    c.C_p = iv(k.at("C_p"));
    c.C_h = iv(k.at("C_h"));
    c.ch_provenance = k.at("C_h_provenance");
    c.sigma = iv(k.at("sigma"));
    c.norm_Q = iv(k.at("norm_Q"));
    c.norm_QQstar = iv(k.at("norm_QQstar"));
    c.norm_shift = iv(k.at("norm_shift"));
    c.norm_provenance = k.at("norm_provenance");
    c.norms_coarse = k.at("norms_coarse");
    c.C_Ms = iv(k.at("C_Ms"));
    c.backend = j.at("spectrum").at("backend");
    for (const auto& e : j.at("spectrum").at("pairs")) c.spectrum.push_back({e.at("value"), e.at("eta")});
    for (const auto& b : j.at("bounds")) c.bounds.push_back({iv(b.at("lambda_h")), iv(b.at("lower")), iv(b.at("upper"))});
    const json& g = j.at("gap");
    if (g.is_object()) c.gap = GapEntry{g.at("j"), g.at("j_cluster"), iv(g.at("nu")), iv(g.at("lower_j"))};
    const json& r = j.at("refined");
    if (r.is_object())
      c.refined = RefinedEntry{iv(r.at("rho")),           ivs(r.at("tau")),
                               ivs(r.at("lower")),         iv(r.at("lambda1_lower")),
                               r.at("ritz").get<std::vector<double>>(), r.at("trials")};
    if (!j.at("lambda_lower").is_null()) c.lambda_lower = iv(j.at("lambda_lower"));
    c.lambda_source = j.at("lambda_source");
    if (!j.at("inv_norm_upper").is_null()) c.inv_norm_upper = iv(j.at("inv_norm_upper"));
    c.certified = j.at("certified");
    c.status = j.at("status");
    c.rigor_level = j.at("rigor_level");
    c.guarantee = j.at("guarantee");
    const json& dg = j.at("diagnostics");
    c.gram_quadrature_defect = dg.at("gram_quadrature_defect");
    c.q_symmetry_defect = dg.at("q_symmetry_defect");
    c.form_consistency = dg.at("form_consistency");
    c.lehmann_symmetry_defect = dg.at("lehmann_symmetry_defect");
    for (const auto& t : j.at("timings")) c.timings.emplace_back(t.at("stage"), t.at("seconds"));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed certificate: ") + e.what());
  }
  return c;
}

void save_certificate(const Certificate& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write certificate " + path);
  os << to_json(c) << '\n';
}

Certificate load_certificate(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read certificate " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return certificate_from_json(ss.str());
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void sort_by_n(std::vector<Certificate>& certs) {
  if (certs.empty()) throw std::runtime_error("no certificates to tabulate");
  std::stable_sort(certs.begin(), certs.end(),
                   [](const Certificate& a, const Certificate& b) { return a.n_cert < b.n_cert; });
}

}  // namespace

std::string table1_csv(std::vector<Certificate> certs) {
  sort_by_n(certs);
  std::string s = "N, C_h, C_Ms, lambda_h1, liu_lower\n";
  for (const auto& c : certs) {
    s += std::to_string(c.n_cert) + ", " + num(c.C_h.hi()) + ", " + num(c.C_Ms.hi()) + ", ";
    s += c.spectrum.empty() ? "--" : num(c.spectrum[0].value);
    s += ", ";
    s += c.bounds.empty() ? "--" : num(c.bounds[0].lower.lo());
    s += '\n';
  }
  return s;
}

std::string table2_csv(std::vector<Certificate> certs) {
  sort_by_n(certs);
  std::string s = "N, j, nu, lambda1_lower, invnorm_upper\n";
  for (const auto& c : certs) {
    s += std::to_string(c.n_cert) + ", ";
    s += c.gap ? std::to_string(c.gap->j_cluster) + ", " + num(c.gap->nu.hi()) : "--, --";
    s += ", ";
    s += c.lambda_lower ? num(c.lambda_lower->lo()) : "--";
    s += ", ";
    s += c.inv_norm_upper ? num(c.inv_norm_upper->hi()) : "--";
    s += '\n';
  }
  return s;
}

}  // namespace invnorm

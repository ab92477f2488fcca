#include "invnorm/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

namespace invnorm {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"problem", {"type", "c", "dim", "m", "coefficients", "solution"}},
      {"discretization", {"n_solve", "n_cert", "quad_order"}},
      {"eigen", {"k", "backend", "jacobi_limit"}},
      {"constants",
       {"ch_mode", "ch_value", "sigma_margin", "norm_Q", "norm_QQstar", "norm_shift", "sup_tol", "sup_max_boxes",
        "rigor"}},
      {"refinement", {"mode", "rho", "strict_tol"}},
      {"newton", {"tol", "max_iter", "damping", "coarse_n", "amplitudes"}},
      {"run", {"threads", "seed", "certificate", "solution_out", "grid_out"}},
  };
  return s;
}

template <class T>
T get(const pt::ptree& t, const std::string& key, T def) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return def;
  try {
    return boost::lexical_cast<T>(boost::trim_copy(*v));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("invalid value '" + *v + "' for " + key);
  }
}

std::optional<double> get_opt(const pt::ptree& t, const std::string& key) {
  if (!t.get_optional<std::string>(key)) return std::nullopt;
  return get<double>(t, key, 0.0);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  std::vector<double> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    try {
      out.push_back(boost::lexical_cast<double>(p));
    } catch (const boost::bad_lexical_cast&) {
      throw ConfigError("invalid list entry '" + p + "'");
    }
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& kv : body)
      if (!it->second.count(kv.first)) throw ConfigError("unknown key '" + kv.first + "' in [" + section + "]");
  }

  RunConfig c;
  PipelineOptions& p = c.pipeline;
  try {
    c.problem = get<std::string>(tree, "problem.type", c.problem);
    c.c = get(tree, "problem.c", c.c);
    c.dim = get(tree, "problem.dim", c.dim);
    c.m = get(tree, "problem.m", c.m);
    c.coefficients = get<std::string>(tree, "problem.coefficients", "");
    c.solution_in = get<std::string>(tree, "problem.solution", "");

    p.n_solve = get(tree, "discretization.n_solve", p.n_solve);
    p.n_cert = get(tree, "discretization.n_cert", p.n_cert);
    p.quad_order = get(tree, "discretization.quad_order", p.quad_order);

    p.k = get(tree, "eigen.k", p.k);
    p.eig.backend = parse_backend(get<std::string>(tree, "eigen.backend", to_string(p.eig.backend)));
    p.eig.jacobi_limit = get(tree, "eigen.jacobi_limit", p.eig.jacobi_limit);

    p.ch_mode = parse_ch_mode(get<std::string>(tree, "constants.ch_mode", to_string(p.ch_mode)));
    p.ch_value = get_opt(tree, "constants.ch_value");
    p.sigma_margin = get(tree, "constants.sigma_margin", p.sigma_margin);
    p.norm_Q = get_opt(tree, "constants.norm_Q");
    p.norm_QQstar = get_opt(tree, "constants.norm_QQstar");
    p.norm_shift = get_opt(tree, "constants.norm_shift");
    p.sup.tol = get(tree, "constants.sup_tol", p.sup.tol);
    p.sup.max_boxes = get(tree, "constants.sup_max_boxes", p.sup.max_boxes);
    const std::string rigor = get<std::string>(tree, "constants.rigor", "interval+residual");
    if (rigor != "interval+residual" && rigor != "float-only") throw ConfigError("unknown rigor mode '" + rigor + "'");
    p.float_only = rigor == "float-only";

    p.refine = parse_refine_mode(get<std::string>(tree, "refinement.mode", to_string(p.refine)));
    p.rho = parse_rho_mode(get<std::string>(tree, "refinement.rho", to_string(p.rho)));
    p.strict_tol = get(tree, "refinement.strict_tol", p.strict_tol);

    p.newton.tol = get(tree, "newton.tol", p.newton.tol);
    p.newton.max_iter = get(tree, "newton.max_iter", p.newton.max_iter);
    p.newton.damping = get(tree, "newton.damping", p.newton.damping);
    p.newton.coarse_n = get(tree, "newton.coarse_n", p.newton.coarse_n);
    if (auto a = tree.get_optional<std::string>("newton.amplitudes")) p.newton.amplitudes = parse_list(*a);

    c.threads = get(tree, "run.threads", c.threads);
    p.seed = get(tree, "run.seed", p.seed);
    c.certificate_out = get<std::string>(tree, "run.certificate", "");
    c.solution_out = get<std::string>(tree, "run.solution_out", "");
    c.grid_out = get<std::string>(tree, "run.grid_out", "");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (c.problem != "lotka-volterra" && c.problem != "constant-q" && c.problem != "custom")
    throw ConfigError("unknown problem type '" + c.problem + "'");
  if (c.problem == "custom" && c.coefficients.empty()) throw ConfigError("custom problem needs problem.coefficients");
  if (c.dim != 1 && c.dim != 2) throw ConfigError("problem.dim must be 1 or 2");
  if (c.m < 1) throw ConfigError("problem.m must be positive");
  if (p.n_solve < 1 || p.n_cert < 1) throw ConfigError("basis sizes must be positive");
  if (p.k < 1) throw ConfigError("eigen.k must be positive");
  if (!(p.sigma_margin > 0)) throw ConfigError("constants.sigma_margin must be positive");
  if (p.ch_mode == ChMode::user && !p.ch_value) throw ConfigError("ch_mode = user needs constants.ch_value");
  if (c.threads < 1) throw ConfigError("run.threads must be positive");
  if (p.newton.amplitudes.empty()) throw ConfigError("newton.amplitudes is empty");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string dump_defaults() {
  const RunConfig c;
  const PipelineOptions& p = c.pipeline;
  std::ostringstream os;
  os.precision(17);
  os << "[problem]\n"
     << "; lotka-volterra | constant-q | custom\n"
     << "type = " << c.problem << "\n"
     << "; constant-q: q = c I on (0,1)^dim with m components\n"
     << "c = " << c.c << "\n"
     << "dim = " << c.dim << "\n"
     << "m = " << c.m << "\n"
     << "; custom: coefficients = path/to/coefficients.json\n"
     << "; pin the approximate solution: solution = path/to/solution.json\n"
     << "\n[discretization]\n"
     << "n_solve = " << p.n_solve << "\n"
     << "n_cert = " << p.n_cert << "\n"
     << "; 0 picks exact Gauss rules from the polynomial degrees\n"
     << "quad_order = " << p.quad_order << "\n"
     << "\n[eigen]\n"
     << "k = " << p.k << "\n"
     << "; auto | jacobi | lapack\n"
     << "backend = " << to_string(p.eig.backend) << "\n"
     << "jacobi_limit = " << p.eig.jacobi_limit << "\n"
     << "\n[constants]\n"
     << "; table | heuristic | user\n"
     << "ch_mode = " << to_string(p.ch_mode) << "\n"
     << "; ch_value = (required for ch_mode = user)\n"
     << "sigma_margin = " << p.sigma_margin << "\n"
     << "; optional user bounds, must dominate the computed ones: norm_Q, norm_QQstar, norm_shift\n"
     << "sup_tol = " << p.sup.tol << "\n"
     << "sup_max_boxes = " << p.sup.max_boxes << "\n"
     << "; interval+residual | float-only\n"
     << "rigor = interval+residual\n"
     << "\n[refinement]\n"
     << "; auto | always | never\n"
     << "mode = " << to_string(p.refine) << "\n"
     << "; gap-top | nu\n"
     << "rho = " << to_string(p.rho) << "\n"
     << "strict_tol = " << p.strict_tol << "\n"
     << "\n[newton]\n"
     << "tol = " << p.newton.tol << "\n"
     << "max_iter = " << p.newton.max_iter << "\n"
     << "damping = " << p.newton.damping << "\n"
     << "coarse_n = " << p.newton.coarse_n << "\n"
     << "amplitudes = ";
  for (std::size_t i = 0; i < p.newton.amplitudes.size(); ++i) os << (i ? ", " : "") << p.newton.amplitudes[i];
  os << "\n\n[run]\n"
     << "threads = " << c.threads << "\n"
     << "seed = " << p.seed << "\n"
     << "; certificate = out.json\n"
     << "; solution_out = solution.json\n"
     << "; grid_out = grid.dat\n";
  return os.str();
}

CoefficientMatrix load_coefficients(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read coefficient file " + path);
  try {
    nlohmann::json j;
    is >> j;
    const int dim = j.at("dim"), m = j.at("m");
    CoefficientMatrix q(dim, m);
    const auto& rows = j.at("entries");
    if (static_cast<int>(rows.size()) != m) throw ConfigError("coefficient file needs m rows");
    for (int a = 0; a < m; ++a) {
      if (static_cast<int>(rows[a].size()) != m) throw ConfigError("coefficient file needs m entries per row");
      for (int b = 0; b < m; ++b) {
        const auto& e = rows[a][b];
        CoefficientField f(e.value("constant", 0.0));
        auto vec = [](const nlohmann::json& v) {
          std::vector<double> c = v.at("coeffs").get<std::vector<double>>();
          return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
        };
        if (e.contains("psi")) f.psi = ScalarField(dim, e["psi"].at("n"), vec(e["psi"]));
        if (e.contains("legendre")) f.legendre = LegendreField(dim, e["legendre"].at("n"), vec(e["legendre"]));
        q(a, b) = std::move(f);
      }
    }
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed coefficient file: ") + e.what());
  } catch (const SpecError& e) {
    throw ConfigError(std::string("malformed coefficient file: ") + e.what());
  }
}

ProblemSpec make_problem(const RunConfig& cfg) {
  if (cfg.problem == "lotka-volterra") return lotka_volterra();
  if (cfg.problem == "constant-q") return constant_q(cfg.c, cfg.dim, cfg.m);
  return custom_coefficients(load_coefficients(cfg.coefficients), "file " + cfg.coefficients);
}

}  // namespace invnorm

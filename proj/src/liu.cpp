#include "invnorm/liu.hpp"

#include <cmath>

namespace invnorm {

ChMode parse_ch_mode(const std::string& s) {
  if (s == "table") return ChMode::table;
  if (s == "heuristic") return ChMode::heuristic;
  if (s == "user") return ChMode::user;
  throw std::invalid_argument("unknown C_h mode '" + s + "'");
}

std::string to_string(ChMode m) {
  switch (m) {
    case ChMode::table:
      return "table";
    case ChMode::heuristic:
      return "heuristic";
    case ChMode::user:
      return "user";
  }
  return "heuristic";
}

Interval poincare_constant(int dim) {
  if (dim == 1) return Interval(1.0) / pi_interval();
  if (dim == 2) return Interval(1.0) / (sqrt(Interval(2.0)) * pi_interval());
  throw ConstantError("Poincare constant only available for the unit interval and unit square");
}

RitzConstant ritz_error_constant(int n, ChMode mode, std::optional<double> user_value) {
  switch (mode) {
    case ChMode::table: {
      double v = 0;
      if (n == 60)
        v = 7.88e-3;
      else if (n == 80)
        v = 5.99e-3;
      else if (n == 100)
        v = 4.84e-3;
      else
        throw ConstantError("no tabulated C_h for N = " + std::to_string(n));
      return {Interval(v), ChMode::table};
    }
    case ChMode::heuristic: {
      const Interval a(2.0 * n + 5), b(2.0 * n + 9);
      return {Interval(1.0) / sqrt(a * b), ChMode::heuristic};
    }
    case ChMode::user:
      if (!user_value || !(*user_value >= 0)) throw ConstantError("user C_h mode needs a non-negative value");
      return {Interval(*user_value), ChMode::user};
  }
  throw ConstantError("unknown C_h mode");
}

Interval select_sigma(const Interval& norm_QQstar, double margin) {
  if (!(margin > 0)) throw ConstantError("sigma margin must be positive");
  double s = norm_QQstar.hi() + margin;
  while (!(s > norm_QQstar.hi())) s = std::nextafter(s, INFINITY);
  return Interval(s);
}

void Constants::validate() const {
  if (!(sigma.lo() > norm_QQstar.hi())) throw ConstantError("sigma does not exceed the bound of ||Q + Q*||");
  for (const Interval* v : {&C_p, &C_h, &norm_Q, &norm_QQstar, &norm_shift})
    if (!std::isfinite(v->lo()) || !std::isfinite(v->hi()) || v->lo() < 0)
      throw ConstantError("constants must be finite and non-negative");
}

Interval cms(const Constants& c, const Interval& lambda_h1) {
  const Interval s = lambda_h1 + c.sigma;
  if (!(s.lo() > 0)) throw ConstantError("lambda_h1 + sigma must be positive");
  const Interval shift = Interval(c.norm_shift.hi());
  const Interval nq = Interval(c.norm_Q.hi());
  return c.C_h * (Interval(1.0) + (shift + sqr(c.C_p) * sqr(nq)) / s);
}

Interval liu_lower(const Interval& lambda_h, const Interval& sigma, const Interval& C_Ms) {
  const Interval s = lambda_h + sigma;
  if (!(s.lo() > 0)) throw ConstantError("lambda_h + sigma must be positive");
  // s / (1 + C^2 s) = 1 / (1/s + C^2): each argument appears once.
  return Interval(1.0) / (Interval(1.0) / s + sqr(C_Ms)) - sigma;
}

EigBounds lower_upper_bounds(const std::vector<Interval>& lambda_h, const Constants& c, const Interval& C_Ms) {
  EigBounds b;
  for (const Interval& l : lambda_h) {
    IndexBounds ib;
    ib.lambda_tilde = l.mid();
    ib.lambda_h = l;
    ib.lower = liu_lower(l, c.sigma, C_Ms);
    ib.upper = l;
    b.items.push_back(ib);
  }
  return b;
}

EigBounds lower_upper_bounds(const SpectrumSlice& slice, const Constants& c, const Interval& C_Ms) {
  std::vector<Interval> l;
  for (const auto& p : slice.pairs) l.push_back(p.enclosure());
  EigBounds b = lower_upper_bounds(l, c, C_Ms);
  for (std::size_t i = 0; i < b.items.size(); ++i) b.items[i].lambda_tilde = slice.pairs[i].value;
  return b;
}

std::optional<GapCertificate> find_gap(const EigBounds& b, double cluster_tol) {
  const auto& it = b.items;
  int cluster = 1;  // cluster index of item i (0-based loop below)
  for (std::size_t j = 1; j < it.size(); ++j) {
    const IndexBounds& prev = it[j - 1];
    if (j >= 2) {
      const IndexBounds& pp = it[j - 2];
      const double tol = cluster_tol * std::max(1.0, std::abs(pp.lambda_tilde)) + pp.lambda_h.width() / 2 +
                         prev.lambda_h.width() / 2;
      if (std::abs(prev.lambda_tilde - pp.lambda_tilde) > tol) ++cluster;
    }
    if (prev.upper.hi() < it[j].lower.lo()) {
      GapCertificate g;
      g.j = static_cast<int>(j) + 1;
      g.j_cluster = cluster + 1;
      g.nu = prev.upper;
      g.lower_j = it[j].lower;
      return g;
    }
  }
  return std::nullopt;
}

}  // namespace invnorm

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invnorm/eig.hpp"
#include "invnorm/interval.hpp"

namespace invnorm {

enum class ChMode { table, heuristic, user };
ChMode parse_ch_mode(const std::string& s);
std::string to_string(ChMode m);

struct ConstantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Poincare constant of the unit box: 1/pi (1D) or 1/(sqrt(2) pi) (2D).
Interval poincare_constant(int dim);

struct RitzConstant {
  Interval value{0.0};
  ChMode provenance = ChMode::heuristic;
};

// Projection error constant C_h. Table mode knows N = 60, 80, 100 only.
RitzConstant ritz_error_constant(int n, ChMode mode, std::optional<double> user_value = std::nullopt);

// sigma = norm_QQstar.hi + margin as an exact float strictly above the bound.
Interval select_sigma(const Interval& norm_QQstar, double margin);

struct Constants {
  Interval C_p{0.0};
  Interval C_h{0.0};
  ChMode ch_provenance = ChMode::heuristic;
  Interval sigma{0.0};
  Interval norm_Q{0.0};
  Interval norm_QQstar{0.0};
  Interval norm_shift{0.0};
  std::string norm_provenance = "computed";

  void validate() const;
};

// C_{M_sigma} = C_h (1 + (||sigma - (Q+Q*)|| + C_p^2 ||Q||^2) / (lambda_h1 + sigma)).
Interval cms(const Constants& c, const Interval& lambda_h1);

// (lambda + sigma) / (1 + C^2 (lambda + sigma)) - sigma, interval-evaluated
// without dependency on the repeated argument.
Interval liu_lower(const Interval& lambda_h, const Interval& sigma, const Interval& C_Ms);

struct IndexBounds {
  double lambda_tilde = 0.0;  // computed discrete eigenvalue
  Interval lambda_h{0.0};     // enclosure of the discrete eigenvalue
  Interval lower{0.0};        // certified lower bound is lower.lo
  Interval upper{0.0};        // certified upper bound is upper.hi
};

struct EigBounds {
  std::vector<IndexBounds> items;
};

EigBounds lower_upper_bounds(const SpectrumSlice& slice, const Constants& c, const Interval& C_Ms);
EigBounds lower_upper_bounds(const std::vector<Interval>& lambda_h, const Constants& c, const Interval& C_Ms);

struct GapCertificate {
  int j = 0;          // 1-based, eigenvalues counted with multiplicity
  int j_cluster = 0;  // 1-based, clusters of numerically equal eigenvalues counted once
  Interval nu{0.0};   // enclosure whose hi bounds lambda^(j-1) from above
  Interval lower_j{0.0};
};

// Smallest j >= 2 with upper(j-1).hi < lower(j).lo.
std::optional<GapCertificate> find_gap(const EigBounds& b, double cluster_tol = 1e-8);

}  // namespace invnorm

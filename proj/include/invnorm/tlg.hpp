#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "invnorm/assembly.hpp"
#include "invnorm/interval.hpp"

namespace invnorm {

struct TlgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lehmann matrices of a trial set u_1..u_n for the unshifted modified operator S:
//   M0_ik = (u_i, u_k)_X, M1_ik = (S u_i, u_k)_X, M2_ik = (S u_i, S u_k)_X.
struct LehmannMatrices {
  Eigen::MatrixXd M0, M1, M2;
  double symmetry_defect = 0.0;
  // Relative difference between M1 and the bilinear form evaluated through
  // the assembled pencil (negative when no cross-check was requested).
  double form_consistency = -1.0;
  double m0_condition = 0.0;
};

LehmannMatrices lehmann_matrices(const std::vector<VectorField>& trials, const CoefficientMatrix& q,
                                 const GramMatrices& gram, const PencilMatrices* cross_check = nullptr);

// Same matrices for an explicitly given symmetric operator on R^d (oracles).
LehmannMatrices lehmann_matrices(const Eigen::MatrixXd& op, const Eigen::MatrixXd& trials);

struct RefinedBound {
  Interval rho{0.0};
  std::vector<Interval> tau;          // negative pencil eigenvalues, ascending
  std::vector<Interval> lower;        // lower[i] bounds lambda^(i+1), i = 0..j-2
  Interval lambda1_lower{0.0};
  std::vector<double> ritz;           // Rayleigh-Ritz values of the trial space
};

// Lehmann-Maehly bounds below rho, where lambda^(j-1) < rho <= lambda^(j).
// rho.lo is used as the separation parameter.
RefinedBound lehmann_bounds(const LehmannMatrices& mats, const Interval& rho, int j, double strict_tol = 1e-10);

}  // namespace invnorm

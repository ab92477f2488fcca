#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invnorm/assembly.hpp"
#include "invnorm/interval.hpp"

namespace invnorm {

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lower Cholesky factor of a symmetric positive definite matrix.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a);

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  int sweeps = 0;
};

// All eigenpairs of a symmetric matrix by cyclic Jacobi rotations.
SymEig sym_eig(const Eigen::MatrixXd& a);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // Mass-normalized coefficient vector
  Interval residual_bound{0.0};
  // [value - eta, value + eta] with eta = residual_bound.hi
  Interval enclosure() const;
};

struct SpectrumSlice {
  std::vector<EigenPair> pairs;
  std::string backend;
  int size() const { return static_cast<int>(pairs.size()); }
};

struct EigOptions {
  enum class Backend { automatic, jacobi, lapack };
  Backend backend = Backend::automatic;
  int jacobi_limit = 400;  // largest order solved by Jacobi in automatic mode
  bool residual_bounds = true;
};

// k smallest eigenpairs of lhs x = lambda Mass x with residual enclosures.
SpectrumSlice gen_eig_smallest(const PencilMatrices& pencil, int k, const EigOptions& opt = {});

// Residual enclosure ||lhs x - lambda Mass x||_{Mass^{-1}} / ||x||_Mass for given pairs.
std::vector<Interval> residual_bounds(const PencilMatrices& pencil, const Eigen::MatrixXd& x,
                                      const std::vector<double>& values);

EigOptions::Backend parse_backend(const std::string& s);
std::string to_string(EigOptions::Backend b);

}  // namespace invnorm

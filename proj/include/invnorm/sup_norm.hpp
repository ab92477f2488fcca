#pragma once

#include "invnorm/coefficients.hpp"
#include "invnorm/interval.hpp"

namespace invnorm {

// Which pointwise matrix the sup norm is taken of.
struct NormTarget {
  enum class Kind { plain, symmetric_part, shifted };
  Kind kind = Kind::plain;
  double sigma = 0.0;  // used by shifted: sigma*I - (q + q^T)

  static NormTarget plain() { return {}; }
  static NormTarget symmetric_part() { return {Kind::symmetric_part, 0.0}; }
  static NormTarget shifted(double s) { return {Kind::shifted, s}; }
};

struct SupNormOptions {
  double tol = 1e-9;  // relative to max(1, bound)
  int max_depth = 64;
  long max_boxes = 400000;
};

struct Box {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};

struct BoxBound {
  Box box;
  Interval bound;
  int depth = 0;
};

struct SupNormResult {
  // lo: value attained at some point; hi: certified upper bound of the supremum.
  Interval bound;
  bool coarse = false;
  long boxes = 0;
};

// Certified upper bound of sup over (0,1)^dim of the spectral norm of the
// target matrix built from q. m <= 2 uses the closed-form largest singular
// value, larger m the bound sqrt(||.||_1 ||.||_inf).
SupNormResult sup_operator_norm(const CoefficientMatrix& q, NormTarget target = NormTarget::plain(),
                                const SupNormOptions& opt = {});

// Pointwise spectral norm of the target matrix in plain floating point
// (used for sampling checks).
double pointwise_norm(const CoefficientMatrix& q, NormTarget target, double x, double y = 0.0);

// Enclosures of P_i(x), P_i'(x) (i = 0..nmax) and psi_i(x) (i = 1..nmax-1)
// at a double point, evaluated in quad-precision intervals.
struct PointBasis {
  std::vector<Interval> P, dP, psi;  // psi[i] for i >= 1, psi[0] unused
};
PointBasis point_basis(int nmax, double x);

}  // namespace invnorm

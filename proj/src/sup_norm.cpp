#include "invnorm/sup_norm.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace invnorm {

PointBasis point_basis(int nmax, double x) {
  PointBasis b;
  b.P.resize(nmax + 1);
  b.dP.resize(nmax + 1);
  b.psi.resize(nmax + 1);
  // Recurrences in t = 2x - 1, quad precision intervals; t is exact.
  const Interval128 t(static_cast<__float128>(2) * x - 1);
  std::vector<Interval128> P(nmax + 1), dP(nmax + 1);
  P[0] = Interval128(1);
  dP[0] = Interval128(0);
  if (nmax >= 1) {
    P[1] = t;
    dP[1] = Interval128(1);
  }
  for (int k = 1; k < nmax; ++k) {
    P[k + 1] = (Interval128(2 * k + 1) * t * P[k] - Interval128(k) * P[k - 1]) / Interval128(k + 1);
    dP[k + 1] = dP[k - 1] + Interval128(2 * k + 1) * P[k];
  }
  for (int k = 0; k <= nmax; ++k) {
    b.P[k] = to_double(P[k]);
    b.dP[k] = to_double(Interval128(2) * dP[k]);
  }
  b.psi[0] = Interval(0);
  for (int i = 1; i < nmax; ++i) b.psi[i] = to_double((P[i - 1] - P[i + 1]) / Interval128(2 * (2 * i + 1)));
  if (nmax >= 1) b.psi[nmax] = Interval(0);
  return b;
}

namespace {

// Local second-order data of a polynomial around a box center.
struct Model {
  Interval v{0}, gx{0}, gy{0};
  double kxx = 0, kxy = 0, kyy = 0;
};

Model scaled_add(const Model& acc, double s, const Model& m) {
  Model r;
  const Interval S(s);
  r.v = acc.v + S * m.v;
  r.gx = acc.gx + S * m.gx;
  r.gy = acc.gy + S * m.gy;
  const double as = std::abs(s);
  r.kxx = (Interval(acc.kxx) + Interval(as) * Interval(m.kxx)).hi();
  r.kxy = (Interval(acc.kxy) + Interval(as) * Interval(m.kxy)).hi();
  r.kyy = (Interval(acc.kyy) + Interval(as) * Interval(m.kyy)).hi();
  return r;
}

// Tensor expansion sum_{i1,i2} c(i1,i2) f_{i1}(x) f_{i2}(y) with per-index
// value and derivative enclosures along each axis.
struct Expansion {
  int dim = 1;
  int n = 0;
  const double* coeffs = nullptr;
  bool psi_basis = true;  // psi_{i+1} versus P_i
  double kxx = 0, kxy = 0, kyy = 0;
};

double max_psi(int i) { return 1.0 / (2 * i + 1); }                       // |psi_i|, i >= 1
double max_dP(int i) { return static_cast<double>(i) * (i + 1); }         // |P_i'|
double max_d2P(int i) { return 0.5 * (i - 1.0) * i * (i + 1.0) * (i + 2.0); }  // |P_i''|

Expansion make_expansion(int dim, int n, const Eigen::VectorXd& c, bool psi_basis) {
  Expansion e{dim, n, c.data(), psi_basis};
  // Per-index sup bounds of value, first and second derivative along one axis.
  auto val = [&](int k) { return psi_basis ? max_psi(k + 1) : 1.0; };
  auto d1 = [&](int k) { return psi_basis ? 1.0 : max_dP(k); };
  auto d2 = [&](int k) { return psi_basis ? max_dP(k + 1) : max_d2P(k); };
  Interval kxx(0), kxy(0), kyy(0);
  if (dim == 1) {
    for (int k = 0; k < n; ++k) kxx += Interval(std::abs(c[k])) * Interval(d2(k));
  } else {
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1) {
        Interval a(std::abs(c[i1 + n * i2]));
        kxx += a * Interval(d2(i1)) * Interval(val(i2));
        kyy += a * Interval(val(i1)) * Interval(d2(i2));
        kxy += a * Interval(d1(i1)) * Interval(d1(i2));
      }
  }
  e.kxx = kxx.hi();
  e.kxy = kxy.hi();
  e.kyy = kyy.hi();
  return e;
}

Model eval_expansion(const Expansion& e, const PointBasis& bx, const PointBasis& by) {
  auto val = [&](const PointBasis& b, int k) { return e.psi_basis ? b.psi[k + 1] : b.P[k]; };
  auto der = [&](const PointBasis& b, int k) { return e.psi_basis ? -b.P[k + 1] : b.dP[k]; };
  Model m;
  m.kxx = e.kxx;
  m.kxy = e.kxy;
  m.kyy = e.kyy;
  const int n = e.n;
  if (e.dim == 1) {
    for (int k = 0; k < n; ++k) {
      Interval c(e.coeffs[k]);
      m.v += c * val(bx, k);
      m.gx += c * der(bx, k);
    }
    return m;
  }
  for (int i2 = 0; i2 < n; ++i2) {
    Interval iv(0), id(0);
    for (int i1 = 0; i1 < n; ++i1) {
      const double c = e.coeffs[i1 + n * i2];
      if (c == 0.0) continue;
      Interval C(c);
      iv += C * val(bx, i1);
      id += C * der(bx, i1);
    }
    m.v += iv * val(by, i2);
    m.gx += id * val(by, i2);
    m.gy += iv * der(by, i2);
  }
  return m;
}

struct EntryData {
  double constant = 0;
  std::vector<Expansion> parts;
};

// Target entry as a signed combination of q entries plus a constant.
struct TargetEntry {
  double constant = 0;
  std::vector<std::pair<double, int>> terms;  // (scale, entry index)
};

class Evaluator {
 public:
  Evaluator(const CoefficientMatrix& q, NormTarget target) : dim_(q.dim()), m_(q.m()) {
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        const CoefficientField& f = q(a, b);
        EntryData d;
        d.constant = f.constant;
        if (f.has_psi()) {
          d.parts.push_back(make_expansion(dim_, f.psi.n(), f.psi.coeffs(), true));
          nmax_ = std::max(nmax_, f.psi.n() + 1);
        }
        if (f.has_legendre()) {
          d.parts.push_back(make_expansion(dim_, f.legendre.n(), f.legendre.coeffs(), false));
          nmax_ = std::max(nmax_, f.legendre.n());
        }
        entries_.push_back(std::move(d));
      }
    targets_.resize(static_cast<std::size_t>(m_) * m_);
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        TargetEntry& t = targets_[a * m_ + b];
        switch (target.kind) {
          case NormTarget::Kind::plain:
            t.terms = {{1.0, a * m_ + b}};
            break;
          case NormTarget::Kind::symmetric_part:
            t.terms = {{1.0, a * m_ + b}, {1.0, b * m_ + a}};
            break;
          case NormTarget::Kind::shifted:
            t.terms = {{-1.0, a * m_ + b}, {-1.0, b * m_ + a}};
            if (a == b) t.constant = target.sigma;
            break;
        }
      }
  }

  int dim() const { return dim_; }

  // Returns (upper bound on box, lower bound of the value at the center,
  // x-sensitivity, y-sensitivity).
  struct Result {
    double ub, center_lo, sx, sy;
  };

  Result evaluate(const Box& box) const {
    const double cx = 0.5 * (box.x0 + box.x1);
    const double hx = std::max((Interval(box.x1) - Interval(cx)).hi(), (Interval(cx) - Interval(box.x0)).hi());
    double cy = 0.0, hy = 0.0;
    const PointBasis bx = point_basis(nmax_, cx);
    PointBasis by;
    if (dim_ == 2) {
      cy = 0.5 * (box.y0 + box.y1);
      hy = std::max((Interval(box.y1) - Interval(cy)).hi(), (Interval(cy) - Interval(box.y0)).hi());
      by = point_basis(nmax_, cy);
    }
    std::vector<Model> qm(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      Model acc;
      acc.v = Interval(entries_[k].constant);
      for (const auto& p : entries_[k].parts) acc = scaled_add(acc, 1.0, eval_expansion(p, bx, by));
      qm[k] = acc;
    }
    std::vector<Model> tm(targets_.size());
    for (std::size_t k = 0; k < targets_.size(); ++k) {
      Model acc;
      acc.v = Interval(targets_[k].constant);
      for (auto [s, idx] : targets_[k].terms) acc = scaled_add(acc, s, qm[idx]);
      tm[k] = acc;
    }
    const Interval HX(hx), HY(hy);
    if (m_ <= 2) return evaluate_small(tm, HX, HY);
    return evaluate_general(tm, HX, HY);
  }

 private:
  struct Local {
    Interval center, range, dx, dy;
  };

  static Local localize(const Model& m, const Interval& hx, const Interval& hy) {
    Local l;
    l.center = m.v;
    const Interval curv = Interval(0.5) * (Interval(m.kxx) * hx * hx + Interval(2.0) * Interval(m.kxy) * hx * hy +
                                           Interval(m.kyy) * hy * hy);
    l.range = m.v + m.gx * symmetric(hx.hi()) + m.gy * symmetric(hy.hi()) + symmetric(curv.hi());
    const Interval ex = Interval(m.kxx) * hx + Interval(m.kxy) * hy;
    const Interval ey = Interval(m.kxy) * hx + Interval(m.kyy) * hy;
    l.dx = m.gx + symmetric(ex.hi());
    l.dy = m.gy + symmetric(ey.hi());
    return l;
  }

  // sqrt(p^2 + q^2): center enclosure, range, and derivative enclosures on the box.
  static Local hypot_local(const Local& p, const Local& q) {
    Local r;
    r.center = sqrt(sqr(p.center) + sqr(q.center));
    r.range = sqrt(sqr(p.range) + sqr(q.range));
    const double lx = sqrt(sqr(Interval(p.dx.mag())) + sqr(Interval(q.dx.mag()))).hi();
    const double ly = sqrt(sqr(Interval(p.dy.mag())) + sqr(Interval(q.dy.mag()))).hi();
    r.dx = symmetric(lx);
    r.dy = symmetric(ly);
    if (r.range.lo() > 0) {
      const Interval qx = (p.range * p.dx + q.range * q.dx) / r.range;
      const Interval qy = (p.range * p.dy + q.range * q.dy) / r.range;
      r.dx = Interval(std::max(qx.lo(), -lx), std::min(qx.hi(), lx));
      r.dy = Interval(std::max(qy.lo(), -ly), std::min(qy.hi(), ly));
    }
    return r;
  }

  static Local combine(const Local& a, double sa, const Local& b, double sb) {
    const Interval A(sa), B(sb);
    return {A * a.center + B * b.center, A * a.range + B * b.range, A * a.dx + B * b.dx, A * a.dy + B * b.dy};
  }

  Result evaluate_small(const std::vector<Model>& tm, const Interval& hx, const Interval& hy) const {
    const Model zero;
    const Model& a = tm[0];
    const Model& b = m_ == 2 ? tm[1] : zero;
    const Model& c = m_ == 2 ? tm[2] : zero;
    const Model& d = m_ == 2 ? tm[3] : zero;
    const Local la = localize(a, hx, hy), lb = localize(b, hx, hy), lc = localize(c, hx, hy),
                ld = localize(d, hx, hy);
    // sigma_max = (|(a+d, b-c)| + |(a-d, b+c)|) / 2
    const Local n1 = hypot_local(combine(la, 1, ld, 1), combine(lb, 1, lc, -1));
    const Local n2 = hypot_local(combine(la, 1, ld, -1), combine(lb, 1, lc, 1));
    const Local g = combine(n1, 0.5, n2, 0.5);
    const Interval mv = g.center + g.dx * symmetric(hx.hi()) + g.dy * symmetric(hy.hi());
    const double ub = std::min(mv.hi(), g.range.hi());
    return {ub, g.center.lo(), g.dx.mag() * hx.hi(), g.dy.mag() * hy.hi()};
  }

  Result evaluate_general(const std::vector<Model>& tm, const Interval& hx, const Interval& hy) const {
    std::vector<Interval> rng(tm.size()), ctr(tm.size());
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < tm.size(); ++k) {
      const Local l = localize(tm[k], hx, hy);
      rng[k] = abs(l.range);
      ctr[k] = abs(l.center);
      sx = std::max(sx, l.dx.mag() * hx.hi());
      sy = std::max(sy, l.dy.mag() * hy.hi());
    }
    auto bound = [&](const std::vector<Interval>& v) {
      Interval col_max(0), row_max(0);
      for (int j = 0; j < m_; ++j) {
        Interval cs(0), rs(0);
        for (int i = 0; i < m_; ++i) {
          cs += v[i * m_ + j];
          rs += v[j * m_ + i];
        }
        col_max = max(col_max, cs);
        row_max = max(row_max, rs);
      }
      return sqrt(col_max * row_max);
    };
    return {bound(rng).hi(), bound(ctr).lo(), sx, sy};
  }

  int dim_, m_;
  int nmax_ = 1;
  std::vector<EntryData> entries_;
  std::vector<TargetEntry> targets_;
};

struct Node {
  Box box;
  double ub;
  int depth;
  double sx, sy;
  bool operator<(const Node& o) const { return ub < o.ub; }
};

}  // namespace

SupNormResult sup_operator_norm(const CoefficientMatrix& q, NormTarget target, const SupNormOptions& opt) {
  if (q.m() < 1) throw SpecError("empty coefficient matrix");
  Evaluator ev(q, target);
  SupNormResult res;
  double lower = -std::numeric_limits<double>::infinity();
  double frozen = -std::numeric_limits<double>::infinity();
  std::priority_queue<Node> heap;
  auto visit = [&](const Box& b, double parent_ub, int depth) {
    auto r = ev.evaluate(b);
    ++res.boxes;
    lower = std::max(lower, r.center_lo);
    heap.push({b, std::min(r.ub, parent_ub), depth, r.sx, r.sy});
  };
  Box root;
  if (q.dim() == 1) root.y0 = root.y1 = 0.0;
  visit(root, std::numeric_limits<double>::infinity(), 0);
  while (!heap.empty()) {
    Node top = heap.top();
    const double tol_abs = opt.tol * std::max(1.0, std::abs(lower));
    if (top.ub <= lower + tol_abs) break;
    if (res.boxes >= opt.max_boxes) {
      res.coarse = true;
      break;
    }
    heap.pop();
    if (top.depth >= opt.max_depth) {
      res.coarse = true;
      frozen = std::max(frozen, top.ub);
      continue;
    }
    bool split_x = true;
    if (q.dim() == 2) {
      const double wx = top.box.x1 - top.box.x0, wy = top.box.y1 - top.box.y0;
      if (top.sx + top.sy > 0)
        split_x = top.sx >= top.sy;
      else
        split_x = wx >= wy;
    }
    Box a = top.box, b = top.box;
    if (split_x) {
      const double mid = 0.5 * (top.box.x0 + top.box.x1);
      a.x1 = mid;
      b.x0 = mid;
    } else {
      const double mid = 0.5 * (top.box.y0 + top.box.y1);
      a.y1 = mid;
      b.y0 = mid;
    }
    visit(a, top.ub, top.depth + 1);
    visit(b, top.ub, top.depth + 1);
  }
  double upper = frozen;
  if (!heap.empty()) upper = std::max(upper, heap.top().ub);
  if (lower > upper) throw std::logic_error("sup norm enclosure inconsistent: attained value above bound");
  res.bound = Interval(lower, upper);
  return res;
}

double pointwise_norm(const CoefficientMatrix& q, NormTarget target, double x, double y) {
  const int m = q.m();
  Eigen::MatrixXd A(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) A(a, b) = q.value(a, b, x, y);
  switch (target.kind) {
    case NormTarget::Kind::plain:
      break;
    case NormTarget::Kind::symmetric_part:
      A = Eigen::MatrixXd(A + A.transpose());
      break;
    case NormTarget::Kind::shifted:
      A = Eigen::MatrixXd(target.sigma * Eigen::MatrixXd::Identity(m, m) - A - A.transpose());
      break;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(0);
}

}  // namespace invnorm

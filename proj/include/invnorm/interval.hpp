#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <quadmath.h>

namespace invnorm {

struct IntervalDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

template <class T>
struct FloatStep;

template <>
struct FloatStep<double> {
  static double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
  static double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
  static double sqrt(double x) { return std::sqrt(x); }
};

template <>
struct FloatStep<__float128> {
  static __float128 up(__float128 x) { return nextafterq(x, HUGE_VALQ); }
  static __float128 down(__float128 x) { return nextafterq(x, -HUGE_VALQ); }
  static __float128 sqrt(__float128 x) { return sqrtq(x); }
};

// Closed interval [lo, hi]. Every operation rounds to nearest and then
// steps each endpoint one float outward, so the exact result is enclosed.
template <class T>
class BasicInterval {
 public:
  using value_type = T;

  constexpr BasicInterval() : lo_(0), hi_(0) {}
  constexpr BasicInterval(T x) : lo_(x), hi_(x) {  // NOLINT: implicit point interval
    if (x != x) throw IntervalDomainError("NaN point interval");
  }
  BasicInterval(T lo, T hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw IntervalDomainError("interval with lo > hi or NaN endpoint");
  }

  static BasicInterval point(T x) { return BasicInterval(x, x); }
  static BasicInterval hull(T a, T b) { return BasicInterval(std::min(a, b), std::max(a, b)); }
  // Smallest representable interval that certainly contains a decimal constant
  // already rounded to nearest.
  static BasicInterval around(T x) { return BasicInterval(FloatStep<T>::down(x), FloatStep<T>::up(x)); }

  T lo() const { return lo_; }
  T hi() const { return hi_; }
  T mid() const { return lo_ / 2 + hi_ / 2; }
  T width() const { return hi_ - lo_; }
  T mag() const { return std::max(absval(lo_), absval(hi_)); }
  T mig() const {
    if (lo_ <= 0 && hi_ >= 0) return T(0);
    return std::min(absval(lo_), absval(hi_));
  }
  bool contains(T x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0 && hi_ >= 0; }

  friend BasicInterval operator+(const BasicInterval& a, const BasicInterval& b) {
    return nonneg_if(outward(a.lo_ + b.lo_, a.hi_ + b.hi_), a.lo_ >= 0 && b.lo_ >= 0);
  }
  friend BasicInterval operator-(const BasicInterval& a, const BasicInterval& b) {
    return outward(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend BasicInterval operator-(const BasicInterval& a) { return BasicInterval(-a.hi_, -a.lo_); }
  friend BasicInterval operator*(const BasicInterval& a, const BasicInterval& b) {
    T p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return nonneg_if(outward(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})), a.lo_ >= 0 && b.lo_ >= 0);
  }
  friend BasicInterval operator/(const BasicInterval& a, const BasicInterval& b) {
    if (b.contains_zero()) throw IntervalDomainError("interval division by an interval containing zero");
    T p1 = a.lo_ / b.lo_, p2 = a.lo_ / b.hi_, p3 = a.hi_ / b.lo_, p4 = a.hi_ / b.hi_;
    return outward(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
  }
  BasicInterval& operator+=(const BasicInterval& b) { return *this = *this + b; }
  BasicInterval& operator-=(const BasicInterval& b) { return *this = *this - b; }
  BasicInterval& operator*=(const BasicInterval& b) { return *this = *this * b; }
  BasicInterval& operator/=(const BasicInterval& b) { return *this = *this / b; }

  friend bool operator==(const BasicInterval& a, const BasicInterval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  static T absval(T x) { return x < 0 ? -x : x; }
  // Sums and products of non-negative operands stay non-negative.
  static BasicInterval nonneg_if(BasicInterval r, bool cond) {
    if (cond && r.lo_ < 0) r.lo_ = 0;
    return r;
  }
  static BasicInterval outward(T lo, T hi) {
    BasicInterval r;
    r.lo_ = FloatStep<T>::down(lo);
    r.hi_ = FloatStep<T>::up(hi);
    return r;
  }
  template <class U>
  friend BasicInterval<U> sqr(const BasicInterval<U>& a);
  template <class U>
  friend BasicInterval<U> sqrt(const BasicInterval<U>& a);
  template <class U>
  friend BasicInterval<U> abs(const BasicInterval<U>& a);

  T lo_, hi_;
};

using Interval = BasicInterval<double>;
using Interval128 = BasicInterval<__float128>;

template <class T>
BasicInterval<T> sqr(const BasicInterval<T>& a) {
  T m = a.mig(), M = a.mag();
  auto r = BasicInterval<T>::outward(m * m, M * M);
  if (r.lo_ < 0) r.lo_ = 0;
  return r;
}

template <class T>
BasicInterval<T> sqrt(const BasicInterval<T>& a) {
  if (a.lo() < 0) throw IntervalDomainError("interval square root of a negative lower endpoint");
  T lo = FloatStep<T>::sqrt(a.lo()), hi = FloatStep<T>::sqrt(a.hi());
  auto r = BasicInterval<T>::outward(lo, hi);
  if (r.lo_ < 0) r.lo_ = 0;
  return r;
}

template <class T>
BasicInterval<T> abs(const BasicInterval<T>& a) {
  BasicInterval<T> r;
  r.lo_ = a.mig();
  r.hi_ = a.mag();
  return r;
}

template <class T>
BasicInterval<T> max(const BasicInterval<T>& a, const BasicInterval<T>& b) {
  return BasicInterval<T>(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

template <class T>
BasicInterval<T> min(const BasicInterval<T>& a, const BasicInterval<T>& b) {
  return BasicInterval<T>(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

template <class T>
BasicInterval<T> hull(const BasicInterval<T>& a, const BasicInterval<T>& b) {
  return BasicInterval<T>(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

// Symmetric interval [-r, r].
template <class T>
BasicInterval<T> symmetric(T r) {
  return BasicInterval<T>(-r, r);
}

// Rounded conversion of a quad interval to a double interval that contains it.
inline Interval to_double(const Interval128& a) {
  double lo = static_cast<double>(a.lo());
  double hi = static_cast<double>(a.hi());
  if (static_cast<__float128>(lo) > a.lo()) lo = FloatStep<double>::down(lo);
  if (static_cast<__float128>(hi) < a.hi()) hi = FloatStep<double>::up(hi);
  return Interval(lo, hi);
}

inline std::ostream& operator<<(std::ostream& os, const Interval& a) {
  return os << '[' << a.lo() << ", " << a.hi() << ']';
}

// Interval pi in double precision.
inline Interval pi_interval() { return Interval::around(M_PI); }

}  // namespace invnorm

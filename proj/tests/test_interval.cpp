#include <cmath>
#include <functional>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "invnorm/interval.hpp"

using namespace invnorm;
using Big = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

namespace {

double ulp(double x) { return std::nextafter(std::abs(x), INFINITY) - std::abs(x); }

bool encloses(const Interval& a, const Big& v) { return Big(a.lo()) <= v && v <= Big(a.hi()); }

struct Node {
  Interval iv;
  Big big;
};

// Random expression tree evaluated in interval and in 256-bit arithmetic.
// Returns false when the tree hits a domain restriction.
bool random_tree(std::mt19937_64& rng, int depth, Node& out) {
  std::uniform_int_distribution<int> op(0, depth == 0 ? 0 : 5);
  std::uniform_real_distribution<double> val(-10, 10);
  std::uniform_int_distribution<int> ex(-8, 8);
  const int o = op(rng);
  if (o == 0) {
    const double x = std::ldexp(val(rng), ex(rng));
    out = {Interval(x), Big(x)};
    return true;
  }
  Node a, b;
  if (!random_tree(rng, depth - 1, a)) return false;
  if (o == 5) {
    if (a.iv.lo() < 0) return false;
    out = {sqrt(a.iv), boost::multiprecision::sqrt(a.big)};
    return true;
  }
  if (!random_tree(rng, depth - 1, b)) return false;
  switch (o) {
    case 1:
      out = {a.iv + b.iv, a.big + b.big};
      break;
    case 2:
      out = {a.iv - b.iv, a.big - b.big};
      break;
    case 3:
      out = {a.iv * b.iv, a.big * b.big};
      break;
    default:
      if (b.iv.contains_zero()) return false;
      out = {a.iv / b.iv, a.big / b.big};
  }
  return true;
}

}  // namespace

TEST(Interval, AdditionOfPointsIsTight) {
  const Interval s = Interval(1.0) + Interval(2.0);
  EXPECT_TRUE(s.contains(3.0));
  EXPECT_LE(s.width(), 2 * ulp(3.0));
}

TEST(Interval, SqrtOfTwoContainsRoot) {
  const Interval r = sqrt(Interval(2.0));
  EXPECT_TRUE(encloses(r, boost::multiprecision::sqrt(Big(2))));
  EXPECT_LE(r.width(), 2 * ulp(1.5));
}

TEST(Interval, ProductWithMixedSigns) {
  const Interval p = Interval(-1.0, 2.0) * Interval(3.0);
  EXPECT_LE(p.lo(), -3.0);
  EXPECT_GE(p.hi(), 6.0);
  EXPECT_GE(p.lo(), -3.0 - ulp(3.0));
  EXPECT_LE(p.hi(), 6.0 + ulp(6.0));
}

TEST(Interval, DomainErrorsAreReported) {
  EXPECT_THROW(Interval(1.0) / Interval(-1.0, 1.0), IntervalDomainError);
  EXPECT_THROW(sqrt(Interval(-1.0, 4.0)), IntervalDomainError);
  EXPECT_THROW(Interval(2.0, 1.0), IntervalDomainError);
  EXPECT_THROW(Interval(NAN), IntervalDomainError);
}

TEST(Interval, SumsOfSquaresStayNonNegative) {
  const Interval z = sqr(Interval(0.0)) + sqr(Interval(0.0));
  EXPECT_GE(z.lo(), 0.0);
  EXPECT_NO_THROW(sqrt(z));
}

TEST(Interval, PiEnclosure) {
  const Interval p = pi_interval();
  const Big pi = boost::multiprecision::atan(Big(1)) * 4;
  EXPECT_TRUE(encloses(p, pi));
}

TEST(Interval, QuadIntervalConvertsOutward) {
  const Interval128 third = Interval128(1) / Interval128(3);
  const Interval d = to_double(third);
  EXPECT_TRUE(encloses(d, Big(1) / 3));
  EXPECT_LE(d.width(), 2 * ulp(1.0 / 3));
}

TEST(PropertyInterval, ContainmentFuzz) {
  std::mt19937_64 rng(20240601);
  int evaluated = 0;
  for (long trial = 0; evaluated < 100000; ++trial) {
    Node n;
    if (!random_tree(rng, 4, n)) continue;
    ++evaluated;
    ASSERT_TRUE(encloses(n.iv, n.big)) << "trial " << trial << " interval [" << n.iv.lo() << ", " << n.iv.hi()
                                       << "] value " << n.big.str(30);
  }
}

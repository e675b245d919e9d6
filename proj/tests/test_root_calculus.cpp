#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "holdercone/errors.hpp"
#include "holdercone/root_calculus.hpp"

using namespace holdercone;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

std::uint64_t partition_count(int n) {
  std::vector<std::uint64_t> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part) {
    for (int s = part; s <= n; ++s) p[static_cast<std::size_t>(s)] += p[static_cast<std::size_t>(s - part)];
  }
  return p[static_cast<std::size_t>(n)];
}

std::uint64_t bell_number(int n) {
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

struct Poly {
  double c, a, x0, b, d;
  FunctionSpec spec() const {
    return FunctionSpec::scaled_sum({{c, FunctionSpec::constant(1.0)},
                                     {a, FunctionSpec::shifted_square(x0)},
                                     {b, FunctionSpec::power(3.0)},
                                     {d, FunctionSpec::power(4.0)}});
  }
  Big value(const Big& x) const {
    const Big u = x - Big(x0);
    return Big(c) + Big(a) * u * u + Big(b) * x * x * x + Big(d) * x * x * x * x;
  }
};

// k-th central difference of f^alpha in 50-digit arithmetic.
double fd_root_derivative(const Poly& p, double alpha, int k, double x) {
  if (k == 0) return static_cast<double>(pow(p.value(Big(x)), Big(alpha)));
  const Big h("1e-9");
  Big acc = 0;
  Big binom = 1;
  for (int i = 0; i <= k; ++i) {
    const Big xi = Big(x) + (Big(k) / 2 - i) * h;
    const Big term = binom * pow(p.value(xi), Big(alpha));
    acc += (i % 2 == 0) ? term : Big(-term);
    binom = binom * (k - i) / (i + 1);
  }
  return static_cast<double>(acc / pow(h, k));
}

}  // namespace

TEST_CASE("tuple enumeration matches partition and Bell numbers") {
  for (int k = 1; k <= kMaxChainOrder; ++k) {
    const auto& t = faa_tuples(k);
    CHECK(t.size() == partition_count(k));
    std::uint64_t set_partitions = 0;
    for (const auto& m : t) {
      int weight = 0;
      int blocks = 0;
      for (int j = 1; j <= k; ++j) {
        weight += j * m.m[static_cast<std::size_t>(j - 1)];
        blocks += m.m[static_cast<std::size_t>(j - 1)];
      }
      CHECK(weight == k);
      CHECK(blocks == m.M);
      set_partitions += m.set_partitions;
    }
    CHECK(set_partitions == bell_number(k));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i - 1].m > t[i].m);
  }
  CHECK_THROWS_AS(faa_tuples(0), RangeError);
  CHECK_THROWS_AS(faa_tuples(21), RangeError);
  CHECK(&faa_tuples(5) == &faa_tuples(5));
}

TEST_CASE("tuple weights are multinomial coefficients") {
  // k = 4: (4,0,0,0) -> 1, (2,1,0,0) -> 4!/(2!1!) = 12, (0,0,0,1) -> 24.
  const auto& t = faa_tuples(4);
  CHECK(t.front().m == std::vector<int>{4, 0, 0, 0});
  CHECK(t.front().weight == 1);
  CHECK(t.back().m == std::vector<int>{0, 0, 0, 1});
  CHECK(t.back().weight == 24);
  CHECK(t.back().set_partitions == 1);
}

TEST_CASE("falling factorial") {
  CHECK(falling_factorial(0.5, 0) == 1.0);
  CHECK(falling_factorial(0.5, 3) == doctest::Approx(0.5 * -0.5 * -1.5));
  CHECK(falling_factorial(2.0, 3) == 0.0);
}

TEST_CASE("power derivative agrees with high-precision finite differences") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 150; ++t) {
    const Poly p{0.01 + u(rng), 2.0 * u(rng), u(rng), u(rng), u(rng)};
    const double alpha = 0.05 + 0.95 * u(rng);
    const int k = static_cast<int>(u(rng) * 5.0) % 5;
    const double x = 0.01 + 0.98 * u(rng);
    const double got = power_derivative(p.spec(), alpha, k, x);
    const double want = fd_root_derivative(p, alpha, k, x);
    CHECK_MESSAGE(std::fabs(got - want) <= 1e-8 * std::max(1.0, std::fabs(want)),
                  "k=" << k << " alpha=" << alpha << " x=" << x);
  }
}

TEST_CASE("power derivative special cases") {
  const std::vector<double> d{4.0, 3.0, 2.0, 1.0};
  CHECK(power_derivative(d, 1.0, 3) == 1.0);
  CHECK(power_derivative(d, 0.5, 0) == 2.0);
  // (sqrt f)' = f' / (2 sqrt f)
  CHECK(power_derivative(d, 0.5, 1) == doctest::Approx(0.75));
  CHECK(power_derivative(std::vector<double>{0.0, 0.0, 0.0}, 0.5, 2) == 0.0);
  CHECK_THROWS_AS(power_derivative(std::vector<double>{0.0, 1.0}, 0.5, 1), SingularPoint);
  CHECK_THROWS_AS(power_derivative(d, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(power_derivative(std::vector<double>{-1.0, 0.0}, 0.5, 1), NegativityError);
}

TEST_CASE("flatness constant matches a Newton solve") {
  for (double beta : {0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 4.0, 7.5}) {
    const int fl = std::max(0, strict_floor(beta));
    double fact = 1.0;
    for (int i = 2; i <= fl; ++i) fact *= i;
    double a = 0.2;
    for (int it = 0; it < 100; ++it) {
      const double g = std::expm1(a) + std::pow(a, beta) / fact - 0.5;
      const double dg = std::exp(a) + beta * std::pow(a, beta - 1.0) / fact;
      a -= g / dg;
      a = std::max(a, 1e-12);
    }
    const auto c = flatness_constant(beta);
    CHECK(c.a == doctest::Approx(a).epsilon(1e-10));
    CHECK(c.residual <= 0.0);
  }
  CHECK_THROWS_AS(flatness_constant(0.0), InvalidArgument);
}

TEST_CASE("stability radius and critical level") {
  const double a = flatness_constant(2.0).a;
  CHECK(stability_radius(0.25, 2.0, 4.0) == doctest::Approx(a * 0.25));
  CHECK(stability_radius(0.0, 2.0, 4.0) == 0.0);
  for (double fx : {1e-6, 0.01, 0.3, 1.0}) {
    const auto j = critical_level(fx, 4.0, 7.0, 10.0);
    REQUIRE(j.has_value());
    const double target = 7.0 / flatness_constant(4.0).a * std::pow(10.0 / fx, 0.25);
    CHECK(std::ldexp(1.0, *j) >= target);
    CHECK(std::ldexp(1.0, *j - 1) < target);
  }
  CHECK(!critical_level(0.0, 4.0, 7.0, 10.0).has_value());
}

TEST_CASE("derivative bound and local root increment") {
  const auto f = FunctionSpec::affine_plus(1.0);
  const auto b = derivative_bound_check(f, 0.5, 2.0, 1, 0.0, 3.0);
  // (sqrt(1 + x))' at 0 is 1/2; rhs = 3^(1/2) * 1^(0.5 - 0.5).
  CHECK(b.lhs == doctest::Approx(0.5));
  CHECK(b.rhs == doctest::Approx(std::sqrt(3.0)));
  CHECK(b.ok);
  const auto r = local_root_holder(f, 0.5, 2.0, 0.0, 0.5, 1.0);
  CHECK(r.lhs == doctest::Approx(std::fabs(0.5 - 0.5 / std::sqrt(1.5))));
  CHECK(r.rhs_scale == doctest::Approx(0.5));
  CHECK_THROWS_AS(derivative_bound_check(FunctionSpec::power(2.0), 0.5, 2.0, 1, 0.0, 1.0), SingularPoint);
}

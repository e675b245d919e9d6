#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "holdercone/errors.hpp"
#include "holdercone/wavelet_engine.hpp"

using namespace holdercone;

namespace {

std::vector<double> random_samples(int J, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(std::size_t{1} << J);
  for (auto& x : v) x = n(rng);
  return v;
}

}  // namespace

TEST_CASE("two-moment filter has the closed-form taps") {
  const auto b = build_basis(2, BoundaryMode::interior_only);
  const double s3 = std::sqrt(3.0);
  const double c = 4.0 * std::sqrt(2.0);
  const std::vector<double> want{(1 + s3) / c, (3 + s3) / c, (3 - s3) / c, (1 - s3) / c};
  for (std::size_t i = 0; i < 4; ++i) CHECK(b.lowpass()[i] == doctest::Approx(want[i]).epsilon(1e-15));
  for (std::size_t n = 0; n < 4; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    CHECK(b.highpass()[n] == sign * b.lowpass()[3 - n]);
  }
  CHECK(b.support_length() == 3.0);
}

TEST_CASE("every embedded filter passes its identities") {
  for (int S = 1; S <= 10; ++S) {
    const auto b = build_basis(S, BoundaryMode::periodized);
    CHECK(b.filter_length() == static_cast<std::size_t>(2 * S));
    const auto d = diagnose_filter(b.lowpass(), S);
    CHECK(d.orthonormality_error < 1e-12);
    CHECK(d.sum_error < 1e-12);
    CHECK(d.moment_error < 1e-10);
  }
  CHECK_THROWS_AS(build_basis(0, BoundaryMode::interior_only), UnsupportedOrder);
  CHECK_THROWS_AS(build_basis(11, BoundaryMode::interior_only), UnsupportedOrder);
  std::vector<double> bad{0.7, 0.7};
  CHECK(diagnose_filter(bad, 1).sum_error > 1e-3);
}

TEST_CASE("decomposition reconstructs its input") {
  for (int S : {1, 3, 5, 10}) {
    const auto x = random_samples(10, static_cast<std::uint64_t>(S));
    const auto dec = decompose(x, build_basis(S, BoundaryMode::periodized), 4);
    const auto y = reconstruct(dec);
    REQUIRE(y.size() == x.size());
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::fabs(x[i] - y[i]));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("coefficients preserve energy") {
  const int J = 11;
  const auto x = random_samples(J, 99);
  const auto dec = decompose(x, build_basis(4, BoundaryMode::periodized), 4);
  double in = 0.0;
  for (double v : x) in += v * v;
  double out = 0.0;
  for (double v : dec.scaling_coeffs) out += v * v;
  for (const auto& [j, d] : dec.detail_coeffs) {
    CHECK(d.size() == std::size_t{1} << j);
    for (double v : d) out += v * v;
  }
  CHECK(out == doctest::Approx(in * std::ldexp(1.0, -J)).epsilon(1e-12));
}

TEST_CASE("reconstructed basis vectors are orthonormal") {
  const int J = 6;
  const std::size_t N = std::size_t{1} << J;
  const auto zero = decompose(std::vector<double>(N, 0.0), build_basis(3, BoundaryMode::periodized), 2);
  std::vector<std::vector<double>> columns;
  auto push = [&](auto&& setter) {
    auto d = zero;
    setter(d);
    columns.push_back(reconstruct(d));
  };
  for (std::size_t k = 0; k < zero.scaling_coeffs.size(); ++k) push([&](auto& d) { d.scaling_coeffs[k] = 1.0; });
  for (const auto& [j, v] : zero.detail_coeffs) {
    for (std::size_t k = 0; k < v.size(); ++k) push([&, j = j](auto& d) { d.detail_coeffs[j][k] = 1.0; });
  }
  REQUIRE(columns.size() == N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a; b < N; ++b) {
      const double ip = std::inner_product(columns[a].begin(), columns[a].end(), columns[b].begin(), 0.0) /
                        static_cast<double>(N);
      CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("finest details match a direct periodic convolution") {
  const int J = 8;
  const std::size_t N = std::size_t{1} << J;
  std::vector<double> x(N, 0.0);
  x[37] = 1.0;
  x[200] = -2.5;
  const auto basis = build_basis(4, BoundaryMode::periodized);
  const auto dec = decompose(x, basis, 4);
  const auto& g = basis.highpass();
  const double scale = std::ldexp(1.0, -J / 2);
  const auto& d = dec.detail_coeffs.at(J - 1);
  for (std::size_t k = 0; k < N / 2; ++k) {
    double want = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) want += g[t] * x[(2 * k + t) % N];
    CHECK(d[k] == doctest::Approx(want * scale).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("polynomials below the moment count leave interior details empty") {
  const int J = 10;
  for (int S : {2, 4, 6}) {
    const auto basis = build_basis(S, BoundaryMode::interior_only);
    for (int p = 0; p < S; ++p) {
      const auto mono = p == 0 ? FunctionSpec::constant(1.0) : FunctionSpec::power(static_cast<double>(p));
      const auto dec = decompose(sample(mono, J), basis, 4);
      for (int j = 4; j < J; ++j) CHECK(level_sup(dec, j, true) < 1e-10);
      CHECK(significant_level_sup(dec, 5, true) == 0.0);
    }
    // Degree S is not annihilated.
    const auto dec = decompose(sample(FunctionSpec::power(static_cast<double>(S)), J), basis, 4);
    CHECK(level_sup(dec, 4, true) > 1e-10);
  }
}

TEST_CASE("interior mask follows the support of each wavelet") {
  const auto basis = build_basis(3, BoundaryMode::interior_only);
  const auto dec = decompose(random_samples(9, 3), basis, 4);
  for (const auto& [j, mask] : dec.interior_mask) {
    for (std::size_t k = 0; k < mask.size(); ++k) {
      const auto [lo, hi] = wavelet_support(basis, j, static_cast<long>(k));
      CHECK(lo == std::ldexp(static_cast<double>(k), -j));
      // The discrete filter at level j spans the nodes 2^(J-j) k .. 2^(J-j) k + (L-1)(2^(J-j)-1).
      const long step = 1L << (9 - j);
      const bool inside = static_cast<long>(k) * step + 5 * (step - 1) <= (1L << 9) - 1;
      CHECK(static_cast<bool>(mask[k]) == inside);
      CHECK(hi > lo);
    }
  }
}

TEST_CASE("decay fit recovers a synthetic slope") {
  const int J = 13;
  const auto basis = build_basis(5, BoundaryMode::periodized);
  auto dec = decompose(std::vector<double>(std::size_t{1} << J, 0.0), basis, 4);
  dec.sample_scale = 1.0;
  for (auto& [j, d] : dec.detail_coeffs) d[1] = 3.0 * std::pow(2.0, -2.25 * j);
  const auto fit = decay_fit(dec, 4, 10, false);
  CHECK(fit.slope == doctest::Approx(-2.25).epsilon(1e-12));
  CHECK(fit.regularity_estimate == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.fitted_levels.size() == 7);
  const auto def = decay_fit(dec, false);
  CHECK(def.j_hi == J - 1 - kExcludedFineLevels);
}

TEST_CASE("decay fit and level queries reject bad input") {
  const auto basis = build_basis(3, BoundaryMode::interior_only);
  const auto flat = decompose(sample(FunctionSpec::constant(2.0), 10), basis, 4);
  CHECK_THROWS_AS(decay_fit(flat, true), DegenerateFit);
  CHECK_THROWS_AS(level_sup(flat, 3, true), RangeError);
  CHECK_THROWS_AS(level_sup(flat, 10, true), RangeError);
  CHECK_THROWS_AS(decompose(std::vector<double>(100, 0.0), basis, 4), ResolutionError);
  CHECK_THROWS_AS(decompose(std::vector<double>(64, 0.0), basis, 4), ResolutionError);
  std::vector<double> nan(256, 0.0);
  nan[3] = NAN;
  CHECK_THROWS_AS(decompose(nan, basis, 4), InvalidArgument);
  CHECK_THROWS_AS(boundary_mode_from_string("edge"), InvalidArgument);
  CHECK(boundary_mode_from_string("interior_only") == BoundaryMode::interior_only);
}

TEST_CASE("classical decay of a Hölder function stays bounded") {
  const auto basis = build_basis(5, BoundaryMode::interior_only);
  const auto r = classical_decay_check(FunctionSpec::power(2.5), 2.5, basis, 14);
  CHECK(r.holder_seminorm == doctest::Approx(3.75).epsilon(1e-6));
  CHECK(r.ratios.max_ratio > 0.0);
  CHECK(r.ratios.max_ratio < 10.0);
  CHECK_THROWS_AS(classical_decay_check(FunctionSpec::power(2.5), 5.0, basis, 14), RegularityMismatch);
}

TEST_CASE("root decay bounds on the flat family") {
  const auto basis = build_basis(5, BoundaryMode::interior_only);
  const auto f = FunctionSpec::flat_family(4.0, 0.1);
  const auto r = prop_decay_check(f, 0.5, 4.0, basis, 14, 0.5);
  CHECK(r.global.max_ratio < 1.0);
  REQUIRE(r.critical_level.has_value());
  CHECK(r.local.levels.front() >= std::max(*r.critical_level, kDefaultCoarseLevel));
  CHECK(r.local.max_ratio < 1.0);
  CHECK_THROWS_AS(prop_decay_check(FunctionSpec::power(4.0), 0.5, 4.0, basis, 12, 0.0), SingularPoint);
  CHECK_THROWS_AS(prop_decay_check(FunctionSpec::power(1.0), 0.5, 2.0, basis, 12, std::nullopt), InvalidArgument);
}

TEST_CASE("roots of sampled functions and the coefficient dump") {
  const auto g = sample_root(FunctionSpec::shifted_square(0.5), 0.5, 6);
  CHECK(g.values()[16] == doctest::Approx(0.25));
  CHECK_THROWS_AS(sample_root(scaled(-1.0, FunctionSpec::constant(1.0)), 0.5, 6), NegativityError);
  const auto dec = decompose(random_samples(8, 5), build_basis(2, BoundaryMode::interior_only), 4);
  std::ostringstream os;
  write_decomposition_csv(os, dec);
  const auto text = os.str();
  CHECK(text.rfind("j,k,coefficient,interior\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + (256 - 16));
}

TEST_CASE("Besov estimate scales linearly") {
  const auto basis = build_basis(4, BoundaryMode::interior_only);
  const auto f = sample(FunctionSpec::flat_family(4.0, 0.2), 12);
  auto scaled_values = f.values();
  for (auto& v : scaled_values) v *= 3.0;
  const double a = besov_norm_estimate(decompose(f, basis, 4), 2.0);
  const double b = besov_norm_estimate(decompose(std::span<const double>(scaled_values.data(), 4096), basis, 4), 2.0);
  CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-12));
}

TEST_CASE("decay fit recovers the exponent of a power function") {
  for (double gamma : {0.5, 1.5, 2.5}) {
    const auto basis = build_basis(static_cast<int>(std::ceil(gamma + 1.0)) + 1, BoundaryMode::interior_only);
    const auto dec = decompose(sample(FunctionSpec::power(gamma), 14), basis, kDefaultCoarseLevel);
    const double reg = decay_fit(dec, true).regularity_estimate;
    CHECK_MESSAGE(reg >= gamma - 0.2, "gamma=" << gamma << " estimate=" << reg);
    CHECK_MESSAGE(reg <= gamma + 0.3, "gamma=" << gamma << " estimate=" << reg);
  }
}

TEST_CASE("fit examples: a kink and a quadratic") {
  const auto b5 = build_basis(5, BoundaryMode::interior_only);
  const auto kink = decompose(sample_root(FunctionSpec::shifted_square(0.5), 0.5, 14), b5, 4);
  CHECK(decay_fit(kink, 4, 10, true).regularity_estimate == doctest::Approx(1.0).epsilon(0.15));
  const auto quad = decompose(sample(FunctionSpec::power(2.0), 14), build_basis(4, BoundaryMode::interior_only), 4);
  bool degenerate = false;
  double reg = 0.0;
  try {
    reg = decay_fit(quad, true).regularity_estimate;
  } catch (const DegenerateFit&) {
    degenerate = true;
  }
  CHECK((degenerate || reg >= 3.0));
}

TEST_CASE("Besov estimate of trivial inputs") {
  const auto basis = build_basis(3, BoundaryMode::interior_only);
  CHECK(besov_norm_estimate(decompose(std::vector<double>(1024, 0.0), basis, 4), 1.5) == 0.0);
  const auto one = decompose(sample(FunctionSpec::constant(1.0), 10), basis, 4);
  double coarse = 0.0;
  for (std::size_t k = 0; k < one.scaling_coeffs.size(); ++k) {
    if (one.scaling_interior[k]) coarse = std::max(coarse, std::fabs(one.scaling_coeffs[k]));
  }
  CHECK(besov_norm_estimate(one, 2.0) == doctest::Approx(coarse).epsilon(1e-12));
  CHECK(coarse == doctest::Approx(0.25));
}

#include "holdercone/root_calculus.hpp"

#include <array>
#include <cmath>

#include "holdercone/errors.hpp"
#include "holdercone/report_io.hpp"

namespace holdercone {

namespace {

constexpr std::array<std::uint64_t, kMaxChainOrder + 1> kFactorial = [] {
  std::array<std::uint64_t, kMaxChainOrder + 1> f{};
  f[0] = 1;
  for (int i = 1; i <= kMaxChainOrder; ++i) f[i] = f[i - 1] * static_cast<std::uint64_t>(i);
  return f;
}();

void enumerate(int k, int j, int remaining, std::vector<int>& m, std::vector<PartitionTuple>& out) {
  if (j > k) {
    if (remaining != 0) return;
    PartitionTuple t;
    t.m = m;
    t.k = k;
    std::uint64_t by_count = 1;
    std::uint64_t by_block = 1;
    for (int i = 0; i < k; ++i) {
      const int mi = m[static_cast<std::size_t>(i)];
      t.M += mi;
      by_count *= kFactorial[mi];
      by_block *= kFactorial[mi];
      for (int r = 0; r < mi; ++r) by_block *= kFactorial[i + 1];
    }
    t.weight = kFactorial[k] / by_count;
    t.set_partitions = kFactorial[k] / by_block;
    out.push_back(std::move(t));
    return;
  }
  for (int mj = remaining / j; mj >= 0; --mj) {
    m[static_cast<std::size_t>(j - 1)] = mj;
    enumerate(k, j + 1, remaining - j * mj, m, out);
  }
  m[static_cast<std::size_t>(j - 1)] = 0;
}

std::vector<std::vector<PartitionTuple>> build_all_tuples() {
  std::vector<std::vector<PartitionTuple>> all(kMaxChainOrder + 1);
  for (int k = 1; k <= kMaxChainOrder; ++k) {
    std::vector<int> m(static_cast<std::size_t>(k), 0);
    enumerate(k, 1, k, m, all[static_cast<std::size_t>(k)]);
  }
  return all;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<double> derivative_values(const FunctionSpec& f, double x, int k) {
  std::vector<double> d(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) d[static_cast<std::size_t>(j)] = evaluate(f, x, j);
  return d;
}

}  // namespace

const std::vector<PartitionTuple>& faa_tuples(int k) {
  if (k < 1 || k > kMaxChainOrder) {
    throw RangeError("chain-rule order " + std::to_string(k) + " outside [1, 20]");
  }
  static const std::vector<std::vector<PartitionTuple>> all = build_all_tuples();
  return all[static_cast<std::size_t>(k)];
}

double falling_factorial(double alpha, int r) {
  double c = 1.0;
  for (int i = 0; i < r; ++i) c *= alpha - i;
  return c;
}

double power_derivative(std::span<const double> derivs, double alpha, int k) {
  if (k < 0) throw InvalidArgument("derivative order must be nonnegative");
  if (derivs.size() < static_cast<std::size_t>(k) + 1) {
    throw InvalidArgument("power_derivative needs f, f', ..., f^(k)");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  const double f = derivs[0];
  if (f < -kNegativityTolerance) {
    throw NegativityError("f^alpha of a negative value " + format_number(f));
  }
  if (alpha == 1.0) return derivs[static_cast<std::size_t>(k)];
  if (f < kZeroThreshold) {
    for (int j = 1; j <= k; ++j) {
      if (derivs[static_cast<std::size_t>(j)] != 0.0) {
        throw SingularPoint("f vanishes with nonzero derivative of order " + std::to_string(j));
      }
    }
    return 0.0;
  }
  if (k == 0) return std::pow(f, alpha);
  double total = 0.0;
  for (const auto& t : faa_tuples(k)) {
    const double c = falling_factorial(alpha, t.M);
    if (c == 0.0) continue;
    double term = static_cast<double>(t.set_partitions) * c * std::pow(f, alpha - t.M);
    for (int j = 1; j <= k; ++j) {
      const int mj = t.m[static_cast<std::size_t>(j - 1)];
      if (mj != 0) term *= std::pow(derivs[static_cast<std::size_t>(j)], mj);
    }
    total += term;
  }
  return total;
}

double power_derivative(const FunctionSpec& f, double alpha, int k, double x) {
  const auto d = derivative_values(f, x, k);
  return power_derivative(d, alpha, k);
}

DerivativeSamples sample_power_derivatives(const FunctionSpec& f, double alpha, int level, int max_order) {
  DerivativeSamples s{NodeGrid::unit(level), {}};
  s.orders.assign(static_cast<std::size_t>(max_order) + 1, std::vector<double>(s.grid.count));
  for (std::size_t i = 0; i < s.grid.count; ++i) {
    const auto d = derivative_values(f, s.grid.node(i), max_order);
    for (int j = 0; j <= max_order; ++j) {
      s.orders[static_cast<std::size_t>(j)][i] = power_derivative(d, alpha, j);
    }
  }
  return s;
}

double flatness_residual(double a, double beta) {
  return std::expm1(a) + std::pow(a, beta) / factorial(std::max(0, strict_floor(beta))) - 0.5;
}

FlatnessConstant flatness_constant(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be a positive real");
  double lo = 1e-15;
  double hi = 2.0;
  // For very small beta the a^beta term exceeds 1/2 at the default bracket.
  while (flatness_residual(lo, beta) > 0.0) {
    lo *= 1e-3;
    if (lo < 1e-300) throw RangeError("no admissible flatness constant found");
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (flatness_residual(mid, beta) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {beta, lo, flatness_residual(lo, beta)};
}

double stability_radius(double fx, double beta, double norm) {
  if (!(norm > 0.0)) throw InvalidArgument("stability_radius needs a positive norm");
  if (fx < -kNegativityTolerance) throw NegativityError("stability_radius of a negative value");
  if (fx <= 0.0) return 0.0;
  return flatness_constant(beta).a * std::pow(fx / norm, 1.0 / beta);
}

double stability_radius(const FunctionSpec& f, double beta, double x, double norm) {
  return stability_radius(evaluate(f, x, 0), beta, norm);
}

DerivativeBound derivative_bound_check(const FunctionSpec& f, double alpha, double beta, int k,
                                       double x, double norm, double budget) {
  if (k < 0 || !(k < beta)) throw InvalidArgument("derivative bound needs 0 <= k < beta");
  const double fx = evaluate(f, x, 0);
  if (fx < kZeroThreshold) throw SingularPoint("derivative bound needs f(x) > 0");
  DerivativeBound b;
  b.lhs = std::fabs(power_derivative(f, alpha, k, x));
  b.rhs = std::pow(norm, k / beta) * std::pow(fx, alpha - k / beta);
  if (b.lhs == 0.0) {
    b.ratio = 0.0;
  } else {
    b.ratio = b.rhs > 0.0 ? b.lhs / b.rhs : INFINITY;
  }
  b.ok = b.lhs <= budget * b.rhs;
  return b;
}

RootHolderIncrement local_root_holder(const FunctionSpec& f, double alpha, double beta, double x,
                                      double y, double seminorm_sum) {
  const double fx = evaluate(f, x, 0);
  const double fy = evaluate(f, y, 0);
  if (fx < kZeroThreshold || fy < kZeroThreshold) {
    throw SingularPoint("local root Hölder bound needs f(x), f(y) > 0");
  }
  const int k = std::max(0, strict_floor(beta));
  RootHolderIncrement r;
  r.lhs = std::fabs(power_derivative(f, alpha, k, x) - power_derivative(f, alpha, k, y));
  r.rhs_scale = seminorm_sum * std::pow(std::fabs(x - y), beta - k) /
                std::pow(std::min(fx, fy), 1.0 - alpha);
  if (r.lhs == 0.0) {
    r.ratio = 0.0;
  } else {
    r.ratio = r.rhs_scale > 0.0 ? r.lhs / r.rhs_scale : INFINITY;
  }
  return r;
}

RootHolderIncrement local_root_holder(const FunctionSpec& f, double alpha, double beta, double x,
                                      double y, int level) {
  const double sum = holder_seminorm(f, beta, level).value + flatness_seminorm(f, beta, level).value;
  return local_root_holder(f, alpha, beta, x, y, sum);
}

std::optional<int> critical_level(double fx0, double beta, double support_length, double norm) {
  if (!(norm > 0.0)) throw InvalidArgument("critical_level needs a positive norm");
  if (fx0 < kZeroThreshold) return std::nullopt;
  const double target =
      support_length / flatness_constant(beta).a * std::pow(norm / fx0, 1.0 / beta);
  if (!std::isfinite(target)) return std::nullopt;
  return std::max(0, static_cast<int>(std::ceil(std::log2(target))));
}

std::optional<int> critical_level(const FunctionSpec& f, double beta, double x0, double support_length,
                                  double norm) {
  return critical_level(evaluate(f, x0, 0), beta, support_length, norm);
}

nlohmann::json to_json(const FlatnessConstant& c) {
  return {{"beta", c.beta}, {"a", c.a}, {"residual", c.residual}};
}

}  // namespace holdercone

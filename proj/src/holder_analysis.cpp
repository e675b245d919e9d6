#include "holdercone/holder_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "holdercone/errors.hpp"
#include "holdercone/parallel.hpp"
#include "holdercone/report_io.hpp"

namespace holdercone {

namespace {

int required_order(double beta) { return std::max(0, strict_floor(beta)); }

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be a positive real");
}

// Pair maximum with a deterministic tie-break: larger ratio wins, equal
// ratios keep the lexicographically smaller (i, k) pair.
struct PairBest {
  double value = 0.0;
  std::size_t i = 0;
  std::size_t k = 0;
  bool found = false;

  void consider(double r, std::size_t a, std::size_t b) {
    if (!found || r > value || (r == value && (a < i || (a == i && b < k)))) {
      value = r;
      i = a;
      k = b;
      found = true;
    }
  }
  void merge(const PairBest& o) {
    if (o.found) consider(o.value, o.i, o.k);
  }
};

// Flatness ratio (|d|^beta / f^(beta-j))^(1/j) at one node.
double flatness_ratio(double f, double d, double beta, int j) {
  const double ad = std::fabs(d);
  if (f < kZeroThreshold) return ad > 0.0 ? INFINITY : 0.0;
  if (ad == 0.0) return 0.0;
  return std::exp((beta * std::log(ad) - (beta - j) * std::log(f)) / j);
}

void check_nonnegative(const DerivativeSamples& s) {
  const auto& f = s.order(0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < -kNegativityTolerance) {
      throw NegativityError("function is negative (" + format_number(f[i]) + ") at x = " +
                            format_number(s.grid.node(i)));
    }
  }
}

void check_order(const DerivativeSamples& s, int needed) {
  if (s.max_order() < needed) {
    throw OrderUnavailable("samples carry derivatives up to order " + std::to_string(s.max_order()) +
                           ", need " + std::to_string(needed));
  }
}

}  // namespace

NodeGrid NodeGrid::unit(int level) { return interval(0.0, 1.0, level); }

NodeGrid NodeGrid::interval(double lo, double hi, int level) {
  if (level < 0 || level > kMaxGridLevel) {
    throw ResolutionError("grid level " + std::to_string(level) + " outside [0, 24]");
  }
  if (!(hi > lo)) throw InvalidArgument("grid interval must satisfy lo < hi");
  const double intervals = std::ldexp(hi - lo, level);
  if (intervals != std::floor(intervals)) {
    throw InvalidArgument("interval length is not a multiple of 2^-level");
  }
  return {lo, std::ldexp(1.0, -level), static_cast<std::size_t>(intervals) + 1, level};
}

const std::vector<double>& DerivativeSamples::order(int j) const {
  if (j < 0 || j > max_order()) {
    throw OrderUnavailable("derivative order " + std::to_string(j) + " not sampled");
  }
  return orders[static_cast<std::size_t>(j)];
}

namespace {

template <typename Eval>
DerivativeSamples tabulate(const NodeGrid& grid, int max_order, Eval eval) {
  DerivativeSamples s{grid, {}};
  s.orders.assign(static_cast<std::size_t>(max_order) + 1, std::vector<double>(grid.count));
  for (int j = 0; j <= max_order; ++j) {
    auto& row = s.orders[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < grid.count; ++i) row[i] = eval(grid.node(i), j);
  }
  return s;
}

}  // namespace

DerivativeSamples sample_derivatives(const FunctionSpec& f, int level, int max_order) {
  return tabulate(NodeGrid::unit(level), max_order,
                  [&](double x, int j) { return evaluate(f, std::min(x, 1.0), j); });
}

DerivativeSamples sample_extended_derivatives(const FunctionSpec& f, double lo, double hi, int level,
                                              int max_order) {
  return tabulate(NodeGrid::interval(lo, hi, level), max_order,
                  [&](double x, int j) { return evaluate_extended(f, x, j); });
}

bool SeminormResult::is_infinite() const { return std::isinf(value); }

nlohmann::json to_json(const SeminormResult& r) {
  nlohmann::json per_order = nlohmann::json::object();
  for (const auto& [j, v] : r.per_order) per_order[std::to_string(j)] = number_or_inf(v);
  nlohmann::json witness = nlohmann::json::array();
  for (const auto& w : r.witness) {
    nlohmann::json e{{"order", w.order}, {"x", w.x}};
    if (w.y) e["y"] = *w.y;
    witness.push_back(std::move(e));
  }
  return {{"value", number_or_inf(r.value)},
          {"per_order", per_order},
          {"witness", witness},
          {"grid_level", r.grid_level}};
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  for (double x : v) {
    if (std::isnan(x)) return NAN;
  }
  return m;
}

SeminormResult holder_seminorm(const DerivativeSamples& s, double beta) {
  check_beta(beta);
  const int k = required_order(beta);
  check_order(s, k);
  const double nu = beta - k;
  const auto& g = s.order(k);
  const std::size_t n = g.size();

  SeminormResult result;
  result.grid_level = s.grid.level;
  if (n < 2) {
    result.per_order[k] = 0.0;
    return result;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(g[i])) {
      const std::size_t other = i + 1 < n ? i + 1 : i - 1;
      result.value = INFINITY;
      result.per_order[k] = INFINITY;
      result.witness.push_back({k, s.grid.node(std::min(i, other)), s.grid.node(std::max(i, other))});
      return result;
    }
  }

  std::vector<double> inv_pow(n);
  for (std::size_t d = 1; d < n; ++d) inv_pow[d] = std::pow(static_cast<double>(d) * s.grid.step, -nu);

  auto sweep_all_pairs = [&](std::size_t stride) {
    const std::size_t m = (n - 1) / stride + 1;
    const std::size_t blocks = std::min<std::size_t>(m, 64);
    std::vector<PairBest> partial(blocks);
    parallel_blocks(m, blocks, [&](std::size_t b, std::size_t lo, std::size_t hi) {
      PairBest best;
      for (std::size_t a = lo; a < hi; ++a) {
        const std::size_t i = a * stride;
        const double gi = g[i];
        for (std::size_t c = a + 1; c < m; ++c) {
          const std::size_t i2 = c * stride;
          best.consider(std::fabs(g[i2] - gi) * inv_pow[i2 - i], i, i2);
        }
      }
      partial[b] = best;
    });
    PairBest best;
    for (const auto& p : partial) best.merge(p);
    return best;
  };

  PairBest best;
  if (n <= kFullPairNodes) {
    best = sweep_all_pairs(1);
  } else {
    const std::size_t stride = (n - 1 + kFullPairNodes - 2) / (kFullPairNodes - 1);
    best = sweep_all_pairs(stride);

    const std::size_t blocks = 64;
    std::vector<PairBest> partial(blocks);
    parallel_blocks(n, blocks, [&](std::size_t b, std::size_t lo, std::size_t hi) {
      PairBest local;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t end = std::min(n, i + kPairBand + 1);
        for (std::size_t i2 = i + 1; i2 < end; ++i2) {
          local.consider(std::fabs(g[i2] - g[i]) * inv_pow[i2 - i], i, i2);
        }
      }
      partial[b] = local;
    });
    for (const auto& p : partial) best.merge(p);

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < kRandomPairs; ++t) {
      std::size_t a = pick(rng);
      std::size_t b = pick(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      best.consider(std::fabs(g[b] - g[a]) * inv_pow[b - a], a, b);
    }
  }

  result.value = best.value;
  result.per_order[k] = best.value;
  result.witness.push_back({k, s.grid.node(best.i), s.grid.node(best.k)});
  return result;
}

SeminormResult holder_seminorm(const FunctionSpec& f, double beta, int level) {
  check_beta(beta);
  return holder_seminorm(sample_derivatives(f, level, required_order(beta)), beta);
}

double holder_norm(const DerivativeSamples& s, double beta) {
  const int k = required_order(beta);
  const auto semi = holder_seminorm(s, beta);
  return sup_abs(s.order(0)) + sup_abs(s.order(k)) + semi.value;
}

double holder_norm(const FunctionSpec& f, double beta, int level) {
  check_beta(beta);
  return holder_norm(sample_derivatives(f, level, required_order(beta)), beta);
}

SeminormResult flatness_seminorm(const DerivativeSamples& s, double beta) {
  check_beta(beta);
  check_nonnegative(s);
  SeminormResult result;
  result.grid_level = s.grid.level;
  if (beta <= 1.0) return result;

  const int top = strict_floor(beta);
  check_order(s, top);
  const auto& f = s.order(0);
  std::vector<WitnessPoint> per_order_witness;
  int best_order = 0;
  for (int j = 1; j <= top; ++j) {
    const auto& d = s.order(j);
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double q = flatness_ratio(f[i], d[i], beta, j);
      if (q > best) {
        best = q;
        arg = i;
      }
    }
    result.per_order[j] = best;
    per_order_witness.push_back({j, s.grid.node(arg), std::nullopt});
    if (best_order == 0 || best > result.value) {
      result.value = best;
      best_order = j;
    }
  }
  result.witness.push_back(per_order_witness[static_cast<std::size_t>(best_order - 1)]);
  for (const auto& w : per_order_witness) {
    if (w.order != best_order) result.witness.push_back(w);
  }
  return result;
}

SeminormResult flatness_seminorm(const FunctionSpec& f, double beta, int level) {
  check_beta(beta);
  return flatness_seminorm(sample_derivatives(f, level, required_order(beta)), beta);
}

double flat_norm(const DerivativeSamples& s, double beta) {
  const double flat = flatness_seminorm(s, beta).value;
  return holder_norm(s, beta) + flat;
}

double flat_norm(const FunctionSpec& f, double beta, int level) {
  check_beta(beta);
  return flat_norm(sample_derivatives(f, level, required_order(beta)), beta);
}

MembershipReport membership(const FunctionSpec& f, double beta, double kappa_budget, int level) {
  check_beta(beta);
  const auto s = sample_derivatives(f, level, required_order(beta));
  MembershipReport report;
  report.seminorm = flatness_seminorm(s, beta);
  const bool holder_finite = std::isfinite(holder_norm(s, beta));
  if (beta > 1.0) {
    const auto& values = s.order(0);
    for (int j = 1; j <= strict_floor(beta); ++j) {
      const auto& d = s.order(j);
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (flatness_ratio(values[i], d[i], beta, j) > kappa_budget) {
          report.violating_points.push_back({j, s.grid.node(i), std::nullopt});
        }
      }
    }
  }
  report.member = holder_finite && report.seminorm.value <= kappa_budget;
  return report;
}

}  // namespace holdercone

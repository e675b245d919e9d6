#include "holdercone/wavelet_engine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <ostream>

#include "holdercone/errors.hpp"
#include "holdercone/holder_analysis.hpp"
#include "holdercone/report_io.hpp"
#include "holdercone/root_calculus.hpp"
#include "wavelet_filters.hpp"

namespace holdercone {

namespace {

constexpr double kFilterTolerance = 1e-10;
constexpr int kMaxWaveletOrder = 10;
constexpr std::size_t kMinFitLevels = 4;

std::vector<double> make_highpass(const std::vector<double>& h) {
  const std::size_t L = h.size();
  std::vector<double> g(L);
  for (std::size_t n = 0; n < L; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    g[n] = sign * h[L - 1 - n];
  }
  return g;
}

void validate_once(int order, std::span<const double> taps) {
  static std::array<std::once_flag, kMaxWaveletOrder + 1> flags;
  std::call_once(flags[static_cast<std::size_t>(order)], [&] {
    const auto d = diagnose_filter(taps, order);
    if (d.orthonormality_error > kFilterTolerance || d.sum_error > kFilterTolerance ||
        d.moment_error > kFilterTolerance) {
      throw UnsupportedOrder("embedded filter of order " + std::to_string(order) +
                             " fails its identities");
    }
  });
}

bool detail_is_interior(int j_max, int j, std::size_t k, std::size_t L) {
  const std::size_t span = std::size_t{1} << (j_max - j);
  const std::size_t last = span * k + (L - 1) * (span - 1);
  return last <= (std::size_t{1} << j_max) - 1;
}

void check_level(const WaveletDecomposition& dec, int j) {
  if (j < dec.j_coarse || j >= dec.j_max) {
    throw RangeError("level " + std::to_string(j) + " outside the decomposition levels [" +
                     std::to_string(dec.j_coarse) + ", " + std::to_string(dec.j_max - 1) + "]");
  }
}

void finish_ratios(LevelRatios& r) {
  r.max_ratio = 0.0;
  for (double v : r.ratios) r.max_ratio = std::max(r.max_ratio, v);
  if (r.ratios.empty() || r.max_ratio == 0.0) {
    r.growth = 0.0;
  } else if (r.ratios.front() == 0.0) {
    r.growth = INFINITY;
  } else {
    r.growth = r.max_ratio / r.ratios.front();
  }
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : INFINITY;
}

int last_analysis_level(int level) { return level - 1 - kExcludedFineLevels; }

void check_regularity(double beta, const WaveletBasis& basis) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be a positive real");
  if (!(beta < basis.order())) {
    throw RegularityMismatch("decay bound needs beta < " + std::to_string(basis.order()) +
                             " (wavelet order)");
  }
}

}  // namespace

std::string_view to_string(BoundaryMode mode) {
  return mode == BoundaryMode::interior_only ? "interior" : "periodized";
}

BoundaryMode boundary_mode_from_string(std::string_view s) {
  if (s == "interior" || s == "interior_only") return BoundaryMode::interior_only;
  if (s == "periodized") return BoundaryMode::periodized;
  throw InvalidArgument("unknown boundary mode '" + std::string(s) + "'");
}

FilterDiagnostics diagnose_filter(std::span<const double> h, int vanishing_moments) {
  FilterDiagnostics d;
  const std::size_t L = h.size();
  for (std::size_t shift = 0; shift < L; shift += 2) {
    double s = 0.0;
    for (std::size_t n = 0; n + shift < L; ++n) s += h[n] * h[n + shift];
    const double target = shift == 0 ? 1.0 : 0.0;
    d.orthonormality_error = std::max(d.orthonormality_error, std::fabs(s - target));
  }
  double total = 0.0;
  for (double v : h) total += v;
  d.sum_error = std::fabs(total - std::sqrt(2.0));

  const std::vector<double> g = make_highpass(std::vector<double>(h.begin(), h.end()));
  const double centre = 0.5 * static_cast<double>(L - 1);
  for (int i = 0; i < vanishing_moments; ++i) {
    double moment = 0.0;
    double scale = 0.0;
    for (std::size_t n = 0; n < L; ++n) {
      const double p = std::pow(static_cast<double>(n) - centre, i);
      moment += p * g[n];
      scale += std::fabs(p * g[n]);
    }
    if (scale > 0.0) d.moment_error = std::max(d.moment_error, std::fabs(moment) / scale);
  }
  return d;
}

WaveletBasis build_basis(int order, BoundaryMode mode) {
  const auto taps = detail::daubechies_lowpass(order);
  validate_once(order, taps);
  WaveletBasis b;
  b.order_ = order;
  b.lowpass_.assign(taps.begin(), taps.end());
  b.highpass_ = make_highpass(b.lowpass_);
  b.mode_ = mode;
  return b;
}

double WaveletDecomposition::noise_floor() const {
  return kRelativeNoiseFloor * sample_scale / std::sqrt(std::ldexp(1.0, j_max));
}

WaveletDecomposition decompose(std::span<const double> samples, const WaveletBasis& basis, int j_coarse) {
  const std::size_t n = samples.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ResolutionError("wavelet input length must be a power of two");
  }
  const int J = std::countr_zero(n);
  if (j_coarse < 0 || J < j_coarse + 4) {
    throw ResolutionError("grid level " + std::to_string(J) + " too coarse for coarse level " +
                          std::to_string(j_coarse) + " (need at least " + std::to_string(j_coarse + 4) +
                          ")");
  }
  WaveletDecomposition dec;
  dec.basis = basis;
  dec.j_max = J;
  dec.j_coarse = j_coarse;
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidArgument("wavelet input contains a non-finite sample");
    dec.sample_scale = std::max(dec.sample_scale, std::fabs(v));
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = samples[i] * scale;

  const auto& h = basis.lowpass();
  const auto& g = basis.highpass();
  const std::size_t L = h.size();
  for (int j = J - 1; j >= j_coarse; --j) {
    const std::size_t N = std::size_t{1} << (j + 1);
    const std::size_t half = N / 2;
    std::vector<double> next(half);
    std::vector<double> detail(half);
    std::vector<std::uint8_t> mask(half);
    for (std::size_t k = 0; k < half; ++k) {
      double s = 0.0;
      double d = 0.0;
      for (std::size_t t = 0; t < L; ++t) {
        const double v = a[(2 * k + t) % N];
        s += h[t] * v;
        d += g[t] * v;
      }
      next[k] = s;
      detail[k] = d;
      mask[k] = detail_is_interior(J, j, k, L) ? 1 : 0;
    }
    dec.detail_coeffs[j] = std::move(detail);
    dec.interior_mask[j] = std::move(mask);
    a = std::move(next);
  }
  dec.scaling_coeffs = std::move(a);
  dec.scaling_interior.resize(dec.scaling_coeffs.size());
  for (std::size_t k = 0; k < dec.scaling_interior.size(); ++k) {
    dec.scaling_interior[k] = detail_is_interior(J, j_coarse, k, L) ? 1 : 0;
  }
  return dec;
}

WaveletDecomposition decompose(const GridFunction& g, const WaveletBasis& basis, int j_coarse) {
  const auto& v = g.values();
  return decompose(std::span<const double>(v.data(), v.size() - 1), basis, j_coarse);
}

std::vector<double> reconstruct(const WaveletDecomposition& dec) {
  const auto& h = dec.basis.lowpass();
  const auto& g = dec.basis.highpass();
  const std::size_t L = h.size();
  std::vector<double> a = dec.scaling_coeffs;
  for (int j = dec.j_coarse; j < dec.j_max; ++j) {
    const auto& d = dec.detail_coeffs.at(j);
    const std::size_t N = std::size_t{1} << (j + 1);
    std::vector<double> up(N, 0.0);
    for (std::size_t k = 0; k < N / 2; ++k) {
      for (std::size_t t = 0; t < L; ++t) up[(2 * k + t) % N] += h[t] * a[k] + g[t] * d[k];
    }
    a = std::move(up);
  }
  const double scale = std::sqrt(static_cast<double>(a.size()));
  for (double& v : a) v *= scale;
  return a;
}

std::pair<double, double> wavelet_support(const WaveletBasis& basis, int j, long k) {
  const double w = std::ldexp(1.0, -j);
  return {static_cast<double>(k) * w, static_cast<double>(k + static_cast<long>(basis.filter_length()) - 1) * w};
}

double level_sup(const WaveletDecomposition& dec, int j, bool interior_only) {
  check_level(dec, j);
  const auto& d = dec.detail_coeffs.at(j);
  const auto& mask = dec.interior_mask.at(j);
  double m = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (interior_only && mask[k] == 0) continue;
    m = std::max(m, std::fabs(d[k]));
  }
  return m;
}

double significant_level_sup(const WaveletDecomposition& dec, int j, bool interior_only) {
  const double s = level_sup(dec, j, interior_only);
  return s > dec.noise_floor() ? s : 0.0;
}

DecaySlopeFit decay_fit(const WaveletDecomposition& dec, int j_lo, int j_hi, bool interior_only) {
  if (j_lo > j_hi) throw RangeError("decay fit needs j_lo <= j_hi");
  check_level(dec, j_lo);
  check_level(dec, j_hi);
  DecaySlopeFit fit;
  fit.j_lo = j_lo;
  fit.j_hi = j_hi;
  std::vector<double> xs;
  std::vector<double> ys;
  const double floor = dec.noise_floor();
  for (int j = j_lo; j <= j_hi; ++j) {
    const double s = level_sup(dec, j, interior_only);
    fit.level_sups.push_back(s);
    if (s > floor) {
      fit.fitted_levels.push_back(j);
      xs.push_back(j);
      ys.push_back(std::log2(s));
    } else {
      fit.excluded_levels.push_back(j);
    }
  }
  if (xs.size() < kMinFitLevels) {
    throw DegenerateFit("only " + std::to_string(xs.size()) +
                        " levels lie above the noise floor; a decay fit needs 4");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.regularity_estimate = -fit.slope - 0.5;
  return fit;
}

DecaySlopeFit decay_fit(const WaveletDecomposition& dec, bool interior_only) {
  return decay_fit(dec, dec.j_coarse, last_analysis_level(dec.j_max), interior_only);
}

nlohmann::json to_json(const DecaySlopeFit& fit) {
  nlohmann::json sups = nlohmann::json::array();
  for (double s : fit.level_sups) sups.push_back(s);
  return {{"j_lo", fit.j_lo},
          {"j_hi", fit.j_hi},
          {"level_sups", sups},
          {"fitted_levels", fit.fitted_levels},
          {"excluded_levels", fit.excluded_levels},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"regularity_estimate", fit.regularity_estimate}};
}

double besov_norm_estimate(const WaveletDecomposition& dec, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("Besov smoothness must be positive");
  const bool interior = dec.basis.boundary_mode() == BoundaryMode::interior_only;
  double coarse = 0.0;
  for (std::size_t k = 0; k < dec.scaling_coeffs.size(); ++k) {
    if (interior && dec.scaling_interior[k] == 0) continue;
    coarse = std::max(coarse, std::fabs(dec.scaling_coeffs[k]));
  }
  double detail = 0.0;
  for (int j = dec.j_coarse; j < dec.j_max; ++j) {
    const double sup = significant_level_sup(dec, j, interior);
    detail = std::max(detail, std::pow(2.0, j * (s + 0.5)) * sup);
  }
  return coarse + detail;
}

nlohmann::json to_json(const LevelRatios& r) {
  return {{"levels", r.levels},
          {"level_sups", r.level_sups},
          {"ratios", r.ratios},
          {"max_ratio", number_or_inf(r.max_ratio)},
          {"growth", number_or_inf(r.growth)}};
}

GridFunction sample_root(const FunctionSpec& f, double alpha, int level) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  const auto g = sample(f, level);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g[i];
    if (y < -kNegativityTolerance) {
      throw NegativityError("f^alpha of a negative value at x = " + format_number(g.node(i)));
    }
    v[i] = std::pow(std::max(y, 0.0), alpha);
  }
  return GridFunction(level, std::move(v));
}

ClassicalDecayReport classical_decay_check(const FunctionSpec& f, double beta, const WaveletBasis& basis,
                                           int level) {
  check_regularity(beta, basis);
  const auto dec = decompose(sample(f, level), basis, kDefaultCoarseLevel);
  const bool interior = basis.boundary_mode() == BoundaryMode::interior_only;
  ClassicalDecayReport r;
  r.beta = beta;
  r.mode = basis.boundary_mode();
  r.holder_seminorm = holder_seminorm(f, beta, std::min(level, 12)).value;
  for (int j = kDefaultCoarseLevel; j <= last_analysis_level(level); ++j) {
    const double sup = significant_level_sup(dec, j, interior);
    r.ratios.levels.push_back(j);
    r.ratios.level_sups.push_back(sup);
    r.ratios.ratios.push_back(safe_ratio(sup * std::pow(2.0, j * (beta + 0.5)), r.holder_seminorm));
  }
  finish_ratios(r.ratios);
  return r;
}

PropDecayReport prop_decay_check(const FunctionSpec& f, double alpha, double beta, const WaveletBasis& basis,
                                 int level, std::optional<double> x0) {
  check_regularity(beta, basis);
  PropDecayReport r;
  r.alpha = alpha;
  r.beta = beta;
  r.mode = basis.boundary_mode();
  r.flat_norm = flat_norm(f, beta, std::min(level, 12));
  if (!std::isfinite(r.flat_norm)) throw InvalidArgument("decay bound needs a finite flat norm");

  const auto dec = decompose(sample_root(f, alpha, level), basis, kDefaultCoarseLevel);
  const bool interior = basis.boundary_mode() == BoundaryMode::interior_only;
  const int j_last = last_analysis_level(level);
  for (int j = kDefaultCoarseLevel; j <= j_last; ++j) {
    const double sup = significant_level_sup(dec, j, interior);
    const double bound = std::pow(r.flat_norm, alpha) * std::pow(2.0, -j * (alpha * beta + 0.5));
    r.global.levels.push_back(j);
    r.global.level_sups.push_back(sup);
    r.global.ratios.push_back(safe_ratio(sup, bound));
  }
  finish_ratios(r.global);

  if (x0) {
    if (!(*x0 >= 0.0 && *x0 <= 1.0)) throw DomainError("x0 must lie in [0, 1]");
    r.x0 = x0;
    const double fx0 = evaluate(f, *x0, 0);
    if (fx0 < kZeroThreshold) throw SingularPoint("local decay bound needs f(x0) > 0");
    r.critical_level = critical_level(fx0, beta, basis.support_length(), r.flat_norm);
    if (!r.critical_level) throw SingularPoint("critical level is unbounded at x0");
    const double floor = dec.noise_floor();
    const long L = static_cast<long>(basis.filter_length());
    for (int j = std::max(*r.critical_level, kDefaultCoarseLevel); j <= j_last; ++j) {
      const auto& d = dec.detail_coeffs.at(j);
      const auto& mask = dec.interior_mask.at(j);
      const double pos = std::ldexp(*x0, j);
      const long k_lo = std::max(0L, static_cast<long>(std::ceil(pos)) - (L - 1));
      const long k_hi = std::min(static_cast<long>(d.size()) - 1, static_cast<long>(std::floor(pos)));
      double sup = 0.0;
      for (long k = k_lo; k <= k_hi; ++k) {
        if (interior && mask[static_cast<std::size_t>(k)] == 0) continue;
        sup = std::max(sup, std::fabs(d[static_cast<std::size_t>(k)]));
      }
      if (sup <= floor) sup = 0.0;
      const double bound =
          r.flat_norm / std::pow(fx0, 1.0 - alpha) * std::pow(2.0, -j * (2.0 * beta + 1.0) / 2.0);
      r.local.levels.push_back(j);
      r.local.level_sups.push_back(sup);
      r.local.ratios.push_back(safe_ratio(sup, bound));
    }
    finish_ratios(r.local);
  }
  return r;
}

nlohmann::json to_json(const ClassicalDecayReport& r) {
  return {{"beta", r.beta},
          {"boundary", std::string(to_string(r.mode))},
          {"holder_seminorm", number_or_inf(r.holder_seminorm)},
          {"ratios", to_json(r.ratios)}};
}

nlohmann::json to_json(const PropDecayReport& r) {
  nlohmann::json j{{"alpha", r.alpha},
                   {"beta", r.beta},
                   {"boundary", std::string(to_string(r.mode))},
                   {"flat_norm", number_or_inf(r.flat_norm)},
                   {"global", to_json(r.global)}};
  if (r.x0) {
    j["x0"] = *r.x0;
    j["critical_level"] = r.critical_level ? nlohmann::json(*r.critical_level) : nlohmann::json("inf");
    j["local"] = to_json(r.local);
  }
  return j;
}

void write_decomposition_csv(std::ostream& out, const WaveletDecomposition& dec) {
  out << "j,k,coefficient,interior\n";
  for (const auto& [j, d] : dec.detail_coeffs) {
    const auto& mask = dec.interior_mask.at(j);
    for (std::size_t k = 0; k < d.size(); ++k) {
      out << j << ',' << k << ',' << format_number(d[k]) << ',' << static_cast<int>(mask[k]) << '\n';
    }
  }
}

}  // namespace holdercone

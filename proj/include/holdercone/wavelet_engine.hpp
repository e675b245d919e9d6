#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "holdercone/function_model.hpp"
#include "json.hpp"

namespace holdercone {

/// `interior_only` restricts level statistics to wavelets whose support lies
/// inside [0,1]; `periodized` uses every coefficient of the periodic
/// transform. The transform itself is periodic in both modes.
enum class BoundaryMode { interior_only, periodized };

std::string_view to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(std::string_view s);

/// Coarsest level used by the analysis helpers below.
inline constexpr int kDefaultCoarseLevel = 4;
/// Decay fits and level sweeps stop this many levels short of the finest
/// detail level, where the sample quadrature dominates.
inline constexpr int kExcludedFineLevels = 2;
/// Level sups at or below relative_noise_floor * max|sample| * 2^(-J/2)
/// count as zero.
inline constexpr double kRelativeNoiseFloor = 1e-12;

class WaveletBasis {
 public:
  int order() const { return order_; }
  const std::vector<double>& lowpass() const { return lowpass_; }
  /// g_n = (-1)^n h_{L-1-n}
  const std::vector<double>& highpass() const { return highpass_; }
  std::size_t filter_length() const { return lowpass_.size(); }
  /// Length of supp(psi) = 2S - 1.
  double support_length() const { return static_cast<double>(filter_length() - 1); }
  BoundaryMode boundary_mode() const { return mode_; }

 private:
  friend WaveletBasis build_basis(int order, BoundaryMode mode);
  int order_ = 0;
  std::vector<double> lowpass_;
  std::vector<double> highpass_;
  BoundaryMode mode_ = BoundaryMode::interior_only;
};

struct FilterDiagnostics {
  /// max_m |sum_n h_n h_{n+2m} - delta_{m,0}|
  double orthonormality_error = 0.0;
  /// |sum_n h_n - sqrt(2)|
  double sum_error = 0.0;
  /// max_{i < S} |sum_n c_n^i g_n| / sum_n |c_n^i g_n| with c_n = n - (L-1)/2.
  double moment_error = 0.0;
};

FilterDiagnostics diagnose_filter(std::span<const double> lowpass, int vanishing_moments);

/// Orthonormal extremal-phase basis with `order` vanishing moments. The
/// embedded taps are checked against the orthonormality, normalization and
/// moment identities the first time each order is requested.
WaveletBasis build_basis(int order, BoundaryMode mode);

struct WaveletDecomposition {
  WaveletBasis basis;
  int j_max = 0;
  int j_coarse = 0;
  /// Coefficients at level j_coarse.
  std::vector<double> scaling_coeffs;
  std::vector<std::uint8_t> scaling_interior;
  /// level j -> 2^j coefficients
  std::map<int, std::vector<double>> detail_coeffs;
  std::map<int, std::vector<std::uint8_t>> interior_mask;
  /// max |input sample|
  double sample_scale = 0.0;

  double noise_floor() const;
};

/// Periodic fast wavelet transform of the samples at x_i = i 2^-J, i < 2^J,
/// scaled by 2^(-J/2) so that coefficients approximate inner products with
/// the L2-normalized basis functions.
WaveletDecomposition decompose(std::span<const double> samples, const WaveletBasis& basis, int j_coarse);
/// Uses the first 2^J values of the grid (the node x = 1 is the periodic
/// image of x = 0).
WaveletDecomposition decompose(const GridFunction& g, const WaveletBasis& basis, int j_coarse);

/// Inverse transform; returns the 2^J unscaled samples.
std::vector<double> reconstruct(const WaveletDecomposition& dec);

/// [k 2^-j, (k + L - 1) 2^-j]
std::pair<double, double> wavelet_support(const WaveletBasis& basis, int j, long k);

/// max_k |<f, psi_{j,k}>|, optionally over interior coefficients only.
double level_sup(const WaveletDecomposition& dec, int j, bool interior_only);

/// level_sup with values at or below the decomposition noise floor set to 0.
double significant_level_sup(const WaveletDecomposition& dec, int j, bool interior_only);

struct DecaySlopeFit {
  int j_lo = 0;
  int j_hi = 0;
  /// level_sup for every level in [j_lo, j_hi]
  std::vector<double> level_sups;
  /// Levels that entered the regression.
  std::vector<int> fitted_levels;
  /// Levels whose sup was at or below the noise floor.
  std::vector<int> excluded_levels;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// -slope - 1/2
  double regularity_estimate = 0.0;
};

/// Least-squares fit of log2(level_sup) against j over [j_lo, j_hi].
/// Throws DegenerateFit when fewer than four levels lie above the noise floor.
DecaySlopeFit decay_fit(const WaveletDecomposition& dec, int j_lo, int j_hi, bool interior_only);
/// Default range [j_coarse, j_max - 1 - kExcludedFineLevels].
DecaySlopeFit decay_fit(const WaveletDecomposition& dec, bool interior_only);

nlohmann::json to_json(const DecaySlopeFit& fit);

/// max_k |<f, phi_k>| + sup_j 2^(j (s + 1/2)) max_k |<f, psi_{j,k}>| over
/// the available levels. Interior-only bases restrict both terms to
/// interior coefficients; level sups below the noise floor contribute 0.
double besov_norm_estimate(const WaveletDecomposition& dec, double s);

/// Per-level ratios of a decay bound.
struct LevelRatios {
  std::vector<int> levels;
  std::vector<double> level_sups;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  /// max_j ratio_j / ratio at the first level (0 when every ratio is 0).
  double growth = 0.0;
};

nlohmann::json to_json(const LevelRatios& r);

struct ClassicalDecayReport {
  double beta = 0.0;
  BoundaryMode mode = BoundaryMode::interior_only;
  double holder_seminorm = 0.0;
  /// level_sup(j) 2^(j (beta + 1/2)) / |f|_{C^beta}
  LevelRatios ratios;
};

/// Samples f at level J, decomposes from kDefaultCoarseLevel and compares
/// level sups with |f|_{C^beta} 2^(-j (beta + 1/2)). Needs beta < S.
ClassicalDecayReport classical_decay_check(const FunctionSpec& f, double beta, const WaveletBasis& basis,
                                           int level);

struct PropDecayReport {
  double alpha = 0.0;
  double beta = 0.0;
  BoundaryMode mode = BoundaryMode::interior_only;
  double flat_norm = 0.0;
  /// level_sup(f^alpha, j) / (||f||^alpha 2^(-j (alpha beta + 1/2)))
  LevelRatios global;
  std::optional<double> x0;
  /// Unset when no x0 was given.
  std::optional<int> critical_level;
  /// max over wavelets at level j >= j(x0) whose support contains x0 of
  /// |coefficient| / ((||f|| / f(x0)^(1-alpha)) 2^(-j (2 beta + 1) / 2))
  LevelRatios local;
};

/// Both coefficient bounds for f^alpha. Needs beta < S and a finite flat
/// norm; the local bound additionally needs f(x0) > 0 (SingularPoint
/// otherwise). Norms are computed on a grid of level min(J, 12).
PropDecayReport prop_decay_check(const FunctionSpec& f, double alpha, double beta, const WaveletBasis& basis,
                                 int level, std::optional<double> x0);

nlohmann::json to_json(const ClassicalDecayReport& r);
nlohmann::json to_json(const PropDecayReport& r);

/// One row per detail coefficient: j,k,coefficient,interior
void write_decomposition_csv(std::ostream& out, const WaveletDecomposition& dec);

/// f(x_i)^alpha on the grid of level J (nonnegative samples required).
GridFunction sample_root(const FunctionSpec& f, double alpha, int level);

}  // namespace holdercone

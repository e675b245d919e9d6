#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "holdercone/function_model.hpp"
#include "json.hpp"

namespace holdercone {

/// Uniform nodes origin + i * step, i = 0 .. count-1.
struct NodeGrid {
  double origin = 0.0;
  double step = 1.0;
  std::size_t count = 0;
  int level = 0;

  double node(std::size_t i) const { return origin + static_cast<double>(i) * step; }

  /// Nodes i * 2^-level on [0,1].
  static NodeGrid unit(int level);
  /// Nodes lo + i * 2^-level on [lo, hi]; (hi - lo) * 2^level must be an integer.
  static NodeGrid interval(double lo, double hi, int level);
};

/// Values of f, f', ..., f^(max_order) at every node of a grid. All seminorm
/// computations run on this table, so the same sweep code serves closed-form
/// families, natural extensions and compositions such as f^alpha.
struct DerivativeSamples {
  NodeGrid grid;
  std::vector<std::vector<double>> orders;

  int max_order() const { return static_cast<int>(orders.size()) - 1; }
  const std::vector<double>& order(int j) const;
};

DerivativeSamples sample_derivatives(const FunctionSpec& f, int level, int max_order);
DerivativeSamples sample_extended_derivatives(const FunctionSpec& f, double lo, double hi, int level,
                                              int max_order);

/// Location attaining (approximately) a grid sup. Flatness witnesses carry
/// the derivative order and one point; Hölder witnesses carry a pair.
struct WitnessPoint {
  int order = 0;
  double x = 0.0;
  std::optional<double> y;
};

struct SeminormResult {
  /// Nonnegative, possibly +infinity.
  double value = 0.0;
  /// Flatness: order j -> (sup_x |f^(j)|^beta / f^(beta-j))^(1/j).
  /// Hölder: the single entry strict_floor(beta) -> value.
  std::map<int, double> per_order;
  std::vector<WitnessPoint> witness;
  int grid_level = 0;

  bool is_infinite() const;
};

nlohmann::json to_json(const SeminormResult& r);

/// Values of f below this magnitude count as exact zeros in flatness ratios.
inline constexpr double kZeroThreshold = 1e-300;
/// Grid values below -kNegativityTolerance raise NegativityError.
inline constexpr double kNegativityTolerance = 1e-12;
/// Node counts up to this use the exhaustive pair sweep.
inline constexpr std::size_t kFullPairNodes = (std::size_t{1} << 12) + 1;
inline constexpr std::size_t kPairBand = 1024;
inline constexpr std::size_t kRandomPairs = 1'000'000;

/// Grid approximation of sup_{x != y} |g(x) - g(y)| / |x - y|^(beta - k) with
/// g = f^(k), k = strict_floor(beta).
///
/// All node pairs are visited when the grid has at most 2^12 + 1 nodes.
/// Finer grids visit every pair of the embedded 2^12 subgrid, every pair with
/// index separation <= 1024, and 10^6 pairs drawn from a fixed-seed
/// generator. The result is a lower bound of the continuum sup.
SeminormResult holder_seminorm(const DerivativeSamples& s, double beta);
SeminormResult holder_seminorm(const FunctionSpec& f, double beta, int level);

/// ||f||_inf + ||f^(k)||_inf + |f|_{C^beta}, each a grid sup.
double holder_norm(const DerivativeSamples& s, double beta);
double holder_norm(const FunctionSpec& f, double beta, int level);

/// max_{1 <= j < beta} (sup_x |f^(j)(x)|^beta / f(x)^(beta-j))^(1/j).
///
/// Zero for beta <= 1. At nodes where f vanishes the ratio is 0 when the
/// derivative vanishes too and +infinity otherwise.
SeminormResult flatness_seminorm(const DerivativeSamples& s, double beta);
SeminormResult flatness_seminorm(const FunctionSpec& f, double beta, int level);

double flat_norm(const DerivativeSamples& s, double beta);
double flat_norm(const FunctionSpec& f, double beta, int level);

struct MembershipReport {
  bool member = false;
  std::vector<WitnessPoint> violating_points;
  SeminormResult seminorm;
};

/// Whether f satisfies the flatness condition with constant kappa_budget on
/// the grid and has finite C^beta terms.
MembershipReport membership(const FunctionSpec& f, double beta, double kappa_budget, int level);

double sup_abs(const std::vector<double>& v);

}  // namespace holdercone

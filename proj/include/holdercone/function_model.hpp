#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace holdercone {

/// Largest integer strictly smaller than `beta`, so that
/// strict_floor(2.0) == 1 and strict_floor(2.5) == 2.
///
/// Every Hölder-type quantity in this library indexes derivatives with this
/// convention. It differs from std::floor exactly at the integers.
int strict_floor(double beta);

/// Sentinel for "derivatives of every order are available".
inline constexpr int kUnlimitedOrder = std::numeric_limits<int>::max();

/// Finest grid level accepted by sample().
inline constexpr int kMaxGridLevel = 24;

/// Dyadic samples of a function on [0,1]: values[i] = f(i * 2^-level).
class GridFunction {
 public:
  GridFunction(int level, std::vector<double> values);

  int level() const { return level_; }
  std::size_t size() const { return values_.size(); }
  double step() const;
  double node(std::size_t i) const;
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Derivative estimate at node i by a second-order finite-difference
  /// stencil (central in the interior, one-sided near the ends).
  double nodal_derivative(std::size_t i, int order) const;

 private:
  int level_;
  std::vector<double> values_;
};

void write_csv(std::ostream& out, const GridFunction& g);
GridFunction read_grid_csv(std::istream& in);

class FunctionSpec;

struct Power {
  double gamma;
};
struct AffinePlus {
  double q;
};
struct Constant {
  double c;
};
struct ShiftedSquare {
  double x0;
};
/// x^beta + delta^(beta-2) x^2 + delta^beta
struct FlatFamily {
  double beta;
  double delta;
};
struct ScaledTerm {
  double coeff;
  std::shared_ptr<const FunctionSpec> function;
};
struct ScaledSum {
  std::vector<ScaledTerm> terms;
};
struct Product {
  std::shared_ptr<const FunctionSpec> left;
  std::shared_ptr<const FunctionSpec> right;
};
struct Tabulated {
  std::shared_ptr<const GridFunction> grid;
};

/// Immutable description of a function on [0,1] with exact derivative
/// evaluators. Instances are cheap to copy; composite families share their
/// children.
class FunctionSpec {
 public:
  using Family = std::variant<Power, AffinePlus, Constant, ShiftedSquare,
                              FlatFamily, ScaledSum, Product, Tabulated>;

  static FunctionSpec power(double gamma);
  static FunctionSpec affine_plus(double q);
  static FunctionSpec constant(double c);
  static FunctionSpec shifted_square(double x0);
  static FunctionSpec flat_family(double beta, double delta);
  static FunctionSpec scaled_sum(std::vector<std::pair<double, FunctionSpec>> terms);
  static FunctionSpec product(FunctionSpec left, FunctionSpec right);
  static FunctionSpec tabulated(GridFunction grid);

  const Family& family() const { return family_; }

  /// Highest derivative order with a closed-form (or stencil) evaluator.
  int max_exact_derivative() const;

  bool is_tabulated() const { return std::holds_alternative<Tabulated>(family_); }

  /// Short human-readable label such as "power(gamma=2)".
  std::string describe() const;

 private:
  explicit FunctionSpec(Family family) : family_(std::move(family)) {}
  Family family_;
};

FunctionSpec scaled(double coeff, const FunctionSpec& f);
FunctionSpec sum(const FunctionSpec& f, const FunctionSpec& g);

/// f^(order)(x) for x in [0,1]. Tabulated functions interpolate nodal
/// stencil derivatives linearly between grid nodes.
double evaluate(const FunctionSpec& spec, double x, int order);

/// Same formula as evaluate() but without the [0,1] restriction; used for
/// the natural extension of a closed-form family to a larger interval.
/// Throws DomainError where the formula is undefined (non-integer powers of
/// negative numbers, tabulated data outside its grid).
double evaluate_extended(const FunctionSpec& spec, double x, int order);

GridFunction sample(const FunctionSpec& spec, int level);

/// Exact antiderivative G with G(0) = 0 and G' = spec.
FunctionSpec antiderivative(const FunctionSpec& spec);

struct TrapezoidAntiderivative {
  GridFunction values;
  /// Order of the quadrature error, 2^(-2 level).
  double error_scale;
};

/// Cumulative trapezoid rule; the tabulated counterpart of antiderivative().
TrapezoidAntiderivative cumulative_trapezoid(const GridFunction& g);

nlohmann::json to_json(const FunctionSpec& spec);
FunctionSpec function_from_json(const nlohmann::json& j);

}  // namespace holdercone

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "holdercone/function_model.hpp"
#include "holdercone/holder_analysis.hpp"
#include "json.hpp"

namespace holdercone {

/// One index tuple (m_1, ..., m_k) of the higher-order chain rule, with
/// sum_j j * m_j = k.
struct PartitionTuple {
  std::vector<int> m;
  int k = 0;
  /// sum_j m_j, the order of the outer derivative.
  int M = 0;
  /// k! / (m_1! ... m_k!)
  std::uint64_t weight = 0;
  /// k! / (prod_j m_j! (j!)^m_j): the number of set partitions of
  /// {1..k} with m_j blocks of size j. This is the integer that actually
  /// multiplies h^(M)(f) prod_j (f^(j))^m_j.
  std::uint64_t set_partitions = 0;
};

inline constexpr int kMaxChainOrder = 20;

/// All tuples for order k in lexicographically descending order of
/// (m_1, ..., m_k); the count is the partition number p(k). Results are
/// built once and shared.
const std::vector<PartitionTuple>& faa_tuples(int k);

/// alpha (alpha - 1) ... (alpha - r + 1), as a running product.
double falling_factorial(double alpha, int r);

/// d^k/dx^k (f(x)^alpha) from the values derivs = (f, f', ..., f^(k)) at one
/// point. At a zero of f the result is 0 when every needed derivative also
/// vanishes; otherwise SingularPoint is thrown. alpha == 1 returns
/// derivs[k] unchanged.
double power_derivative(std::span<const double> derivs, double alpha, int k);
double power_derivative(const FunctionSpec& f, double alpha, int k, double x);

/// Table of (f^alpha)^(j) for j <= max_order at every grid node.
DerivativeSamples sample_power_derivatives(const FunctionSpec& f, double alpha, int level, int max_order);

struct FlatnessConstant {
  double beta = 0.0;
  double a = 0.0;
  /// (e^a - 1) + a^beta / strict_floor(beta)! - 1/2; never positive.
  double residual = 0.0;
};

double flatness_residual(double a, double beta);

/// Largest a with (e^a - 1) + a^beta / strict_floor(beta)! <= 1/2, found by
/// bisection on [1e-15, 2] to relative tolerance 1e-12.
FlatnessConstant flatness_constant(double beta);

/// a(beta) * (f(x) / norm)^(1/beta); zero where f(x) = 0.
double stability_radius(double fx, double beta, double norm);
double stability_radius(const FunctionSpec& f, double beta, double x, double norm);

inline constexpr double kDefaultConstantBudget = 1e4;

struct DerivativeBound {
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs (0 when both vanish).
  double ratio = 0.0;
  bool ok = false;
};

/// |(f^alpha)^(k)(x)| against norm^(k/beta) f(x)^(alpha - k/beta); ok when
/// lhs <= budget * rhs.
DerivativeBound derivative_bound_check(const FunctionSpec& f, double alpha, double beta, int k,
                                       double x, double norm,
                                       double budget = kDefaultConstantBudget);

struct RootHolderIncrement {
  double lhs = 0.0;
  double rhs_scale = 0.0;
  double ratio = 0.0;
};

/// Increment of the strict_floor(beta)-th derivative of f^alpha between x
/// and y, and the scale
///   seminorm_sum * |x - y|^(beta - strict_floor(beta)) / min(f(x), f(y))^(1 - alpha)
/// where seminorm_sum = |f|_{C^beta} + |f|_{H^beta} is supplied by the caller.
RootHolderIncrement local_root_holder(const FunctionSpec& f, double alpha, double beta, double x,
                                      double y, double seminorm_sum);
/// Same, computing seminorm_sum on a grid of the given level.
RootHolderIncrement local_root_holder(const FunctionSpec& f, double alpha, double beta, double x,
                                      double y, int level = 12);

/// Smallest j >= 0 with 2^j >= support_length / a(beta) * (norm / f(x0))^(1/beta).
/// std::nullopt means the level is unbounded (f(x0) = 0).
std::optional<int> critical_level(double fx0, double beta, double support_length, double norm);
std::optional<int> critical_level(const FunctionSpec& f, double beta, double x0, double support_length,
                                  double norm);

nlohmann::json to_json(const FlatnessConstant& c);

}  // namespace holdercone

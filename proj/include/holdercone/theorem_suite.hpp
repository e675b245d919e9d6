#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holdercone/function_model.hpp"
#include "holdercone/wavelet_engine.hpp"
#include "json.hpp"

namespace holdercone {

enum class ClaimId {
  MainTheorem,
  EmbeddingSeminorm,
  ConeTriangle,
  ConeHomogeneity,
  ProductBound,
  Nesting_i,
  Nesting_ii,
  Nesting_iii,
  AutoFlatness,
  Integration,
  FxFxRel,
  LocalStability,
  RootHolder,
  DerivBounds,
  PropDecayGlobal,
  PropDecayLocal,
  ClassicalDecay,
  CounterexampleCap,
};

inline constexpr int kClaimCount = 18;

std::string_view to_string(ClaimId id);
ClaimId claim_from_string(std::string_view s);

enum class Verdict { pass, fail, not_applicable };

std::string_view to_string(Verdict v);

struct VerificationReport {
  ClaimId claim = ClaimId::MainTheorem;
  /// Label of the family in the suite configuration (empty outside suites).
  std::string family;
  /// Function JSON plus the parameters the claim was evaluated at.
  nlohmann::json family_params = nlohmann::json::object();
  double measured_constant = 0.0;
  double budget = 0.0;
  Verdict verdict = Verdict::not_applicable;
  /// Each witness is a JSON object whose fields are enough to re-evaluate
  /// the offending quantity.
  std::vector<nlohmann::json> witnesses;
  /// Auxiliary measurements (per-level ratios, growth, sweeps).
  nlohmann::json details = nlohmann::json::object();
  std::string note;
  bool allow_listed = false;
};

nlohmann::json to_json(const VerificationReport& r);

/// Default budget of each claim. Claims with constants fixed by the
/// statement (product 2^(beta+2), auto-flatness 2^beta, pointwise
/// inequalities 1) use those; the unspecified constants get generous values.
double default_budget(ClaimId id, double beta);

/// Budget of one claim: the override if present, the default otherwise.
struct Budgets {
  std::map<ClaimId, double> overrides;
  double get(ClaimId id, double beta) const;
};

/// Besov-scale bound of the main theorem (MainTheorem) and the flatness
/// seminorm bound of f^alpha at index alpha*beta (EmbeddingSeminorm).
/// Infinite flat norm gives not_applicable; alpha*beta >= S raises
/// RegularityMismatch.
std::vector<VerificationReport> verify_main(const FunctionSpec& f, double alpha, double beta,
                                            const WaveletBasis& basis, int level,
                                            const Budgets& budgets = {});

/// ConeTriangle, ConeHomogeneity and ProductBound for the pair (f, g).
std::vector<VerificationReport> verify_cone(const FunctionSpec& f, const FunctionSpec& g, double beta,
                                            int level, const Budgets& budgets = {});

/// Nesting_i, Nesting_ii and Nesting_iii with beta_prime <= beta.
std::vector<VerificationReport> verify_nesting(const FunctionSpec& f, double beta, double beta_prime,
                                               int level, const Budgets& budgets = {});

/// Flatness of the restriction to [0,1] against the Hölder seminorm of the
/// natural extension to [-1,2]. Throws ExtensionNotNonnegative when the
/// extension dips below zero or is undefined there.
VerificationReport verify_auto_flatness(const FunctionSpec& f, double beta, int level,
                                        const Budgets& budgets = {});

/// Integration (norm of the antiderivative) and FxFxRel (the pointwise
/// relation between f and its antiderivative after normalizing the flat
/// norm to one).
std::vector<VerificationReport> verify_integration(const FunctionSpec& f, double beta, int level,
                                                   const Budgets& budgets = {});

/// Exhaustive grid check of |f(x+h) - f(x)| <= |f(x)|/2 for
/// h = +-stability_radius, with x + h clipped to [0,1].
VerificationReport verify_local_stability(const FunctionSpec& f, double beta, int level,
                                          const Budgets& budgets = {});

/// Norm bound for f^alpha when f >= epsilon > 0, plus a sweep of local
/// root-Hölder ratios over positive grid nodes (reported in details).
VerificationReport verify_root_holder(const FunctionSpec& f, double alpha, double beta,
                                      std::optional<double> epsilon, int level,
                                      const Budgets& budgets = {});

/// max over k < beta and positive grid nodes of the derivative-bound ratio
/// for f^alpha.
VerificationReport verify_deriv_bounds(const FunctionSpec& f, double alpha, double beta, int level,
                                       const Budgets& budgets = {});

/// PropDecayGlobal and PropDecayLocal.
std::vector<VerificationReport> verify_prop_decay(const FunctionSpec& f, double alpha, double beta,
                                                  const WaveletBasis& basis, int level,
                                                  std::optional<double> x0, const Budgets& budgets = {});

VerificationReport verify_classical_decay(const FunctionSpec& f, double beta, const WaveletBasis& basis,
                                          int level, const Budgets& budgets = {});

/// Regularity estimate of sqrt(f) against the Lipschitz cap, together with
/// the finiteness pattern flat_norm(f, 2) < inf = flat_norm(f, 2.5).
VerificationReport verify_counterexample_cap(const FunctionSpec& f, const WaveletBasis& basis, int level,
                                             const Budgets& budgets = {});

struct SuiteFamily {
  std::string name;
  FunctionSpec function;
  std::optional<double> epsilon;
};

struct SuiteParameters {
  double alpha = 0.5;
  double beta = 2.0;
  double beta_prime = 1.5;
};

struct AllowEntry {
  ClaimId claim;
  std::string family;
};

struct SuiteConfig {
  std::vector<SuiteFamily> families;
  std::vector<SuiteParameters> parameters;
  /// Pairs of family names fed to verify_cone.
  std::vector<std::pair<std::string, std::string>> cone_pairs;
  std::optional<FunctionSpec> counterexample;
  /// Grid level for seminorm sweeps.
  int grid_level = 12;
  /// Grid level for wavelet decompositions.
  int wavelet_level = 14;
  int wavelet_order = 5;
  BoundaryMode boundary = BoundaryMode::interior_only;
  std::optional<double> x0 = 0.5;
  Budgets budgets;
  std::vector<AllowEntry> allow_list;
};

SuiteConfig default_suite_config();
SuiteConfig suite_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SuiteConfig& c);

struct SuiteResult {
  std::vector<VerificationReport> reports;
  /// No fail outside the allow-list.
  bool passed = false;
};

/// Runs every verification over the configured families and parameter
/// sets. Independent tasks run concurrently; reports are ordered by claim,
/// then family order, then parameter order. Throws ConfigError for an empty
/// family or parameter list or unknown names.
SuiteResult run_suite(const SuiteConfig& config);

std::string suite_report_json(const SuiteResult& result);
std::string suite_summary_csv(const SuiteResult& result);

}  // namespace holdercone

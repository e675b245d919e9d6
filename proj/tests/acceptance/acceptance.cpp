// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "holdercone/cli.hpp"
#include "holdercone/errors.hpp"
#include "holdercone/holder_analysis.hpp"
#include "holdercone/root_calculus.hpp"
#include "holdercone/theorem_suite.hpp"
#include "holdercone/wavelet_engine.hpp"

using namespace holdercone;
using Big = boost::multiprecision::cpp_bin_float_50;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int g_failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_seconds;
  const bool ok = o.ok && in_time;
  if (!ok) ++g_failures;
  std::printf("%s criterion %d (%s): %s; %.2f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs, limit_seconds, in_time ? "" : " TIMEOUT");
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

FunctionSpec random_cone_member(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);
  switch (pick(rng)) {
    case 0:
      return FunctionSpec::power(2.0 + 2.0 * u(rng));
    case 1:
      return FunctionSpec::affine_plus(0.05 + u(rng));
    case 2:
      return FunctionSpec::constant(0.1 + 2.0 * u(rng));
    case 3:
      return scaled(0.2 + 3.0 * u(rng), FunctionSpec::shifted_square(u(rng)));
    case 4:
      return FunctionSpec::flat_family(4.0, 0.02 + 0.3 * u(rng));
    default:
      return FunctionSpec::scaled_sum({{u(rng), FunctionSpec::shifted_square(u(rng))},
                                       {0.01 + u(rng), FunctionSpec::constant(1.0)}});
  }
}

// 50-digit closed form of c + a (x - x0)^2 + b x^3 + d x^4.
struct Quartic {
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

double central_difference(const Quartic& q, double alpha, int k, double x) {
  if (k == 0) return static_cast<double>(pow(q.value(Big(x)), Big(alpha)));
  const Big h("1e-9");
  Big acc = 0;
  Big binom = 1;
  for (int i = 0; i <= k; ++i) {
    const Big term = binom * pow(q.value(Big(x) + (Big(k) / 2 - i) * h), Big(alpha));
    acc += (i % 2 == 0) ? term : Big(-term);
    binom = binom * (k - i) / (i + 1);
  }
  return static_cast<double>(acc / pow(h, k));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "closed-form flatness seminorm", 1.0, [] {
    const double v = flatness_seminorm(FunctionSpec::affine_plus(0.5), 2.0, 14).value;
    return Outcome{std::fabs(v - 2.0) <= 1e-4, "value " + fmt(v) + ", expected 2"};
  });

  criterion(2, "membership iff beta <= gamma", 5.0, [] {
    int wrong = 0;
    for (double gamma : {1.0, 2.0, 3.0}) {
      for (double beta : {1.5, 2.0, 2.5, 3.0}) {
        const bool finite = std::isfinite(flatness_seminorm(FunctionSpec::power(gamma), beta, 12).value);
        if (finite != (beta <= gamma)) ++wrong;
      }
    }
    return Outcome{wrong == 0, std::to_string(wrong) + " of 12 cases wrong"};
  });

  criterion(3, "cone algebra fuzz", 60.0, [] {
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0;
    double worst_triangle = 0.0, worst_homog = 0.0, worst_product = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const auto f = random_cone_member(rng);
      const auto g = random_cone_member(rng);
      const double beta = 1.2 + 0.8 * u(rng);
      const auto rs = verify_cone(f, g, beta, 8);
      for (const auto& r : rs) {
        if (r.verdict != Verdict::pass) ++bad;
        if (r.claim == ClaimId::ConeTriangle) worst_triangle = std::max(worst_triangle, r.measured_constant);
        if (r.claim == ClaimId::ConeHomogeneity) worst_homog = std::max(worst_homog, r.measured_constant);
        if (r.claim == ClaimId::ProductBound) {
          worst_product = std::max(worst_product, r.measured_constant / std::pow(2.0, beta + 2.0));
        }
      }
    }
    const bool ok = bad == 0 && worst_triangle <= 1.0 + 1e-9 && worst_homog <= 1e-9 && worst_product <= 1.0;
    return Outcome{ok, std::to_string(bad) + " failing checks; max triangle ratio " + fmt(worst_triangle) +
                           ", max homogeneity error " + fmt(worst_homog) + ", max product/2^(beta+2) " +
                           fmt(worst_product)};
  });

  criterion(4, "auto-flatness constant 2^beta", 30.0, [] {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int bad = 0;
    for (int t = 0; t < 50; ++t) {
      std::vector<std::pair<double, FunctionSpec>> terms{{0.1 + 2.0 * u(rng), FunctionSpec::shifted_square(u(rng))}};
      if (t % 2 == 0) terms.push_back({0.05 + u(rng), FunctionSpec::constant(1.0)});
      if (t % 3 == 0) terms.push_back({u(rng), FunctionSpec::shifted_square(u(rng))});
      const auto f = FunctionSpec::scaled_sum(std::move(terms));
      const double beta = 1.0 + std::max(1e-3, u(rng));
      const auto r = verify_auto_flatness(f, beta, 10);
      const double scaled = r.measured_constant / std::pow(2.0, beta);
      worst = std::max(worst, scaled);
      if (r.verdict != Verdict::pass) ++bad;
    }
    return Outcome{bad == 0 && worst <= 1.0,
                   std::to_string(bad) + " of 50 over budget; max ratio/2^beta " + fmt(worst)};
  });

  criterion(5, "chain-rule derivatives against finite differences", 10.0, [] {
    std::mt19937_64 rng(161803);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      const Quartic q{0.01 + u(rng), 2.0 * u(rng), u(rng), u(rng), u(rng)};
      const double alpha = 0.05 + 0.95 * u(rng);
      const int k = t % 5;
      const double x = 0.01 + 0.98 * u(rng);
      const double got = power_derivative(q.spec(), alpha, k, x);
      const double want = central_difference(q, alpha, k, x);
      worst = std::max(worst, std::fabs(got - want) / std::max(std::fabs(want), 1e-300));
    }
    return Outcome{worst <= 1e-5, "max relative error " + fmt(worst) + " over 500 cases"};
  });

  criterion(6, "local stability at every node", 10.0, [] {
    std::string detail;
    bool ok = true;
    for (double delta : {0.05, 0.1, 0.2}) {
      const auto r = verify_local_stability(FunctionSpec::flat_family(4.0, delta), 4.0, 14);
      const bool clean = r.verdict == Verdict::pass && r.measured_constant <= 1.0;
      ok = ok && clean;
      detail += "delta " + fmt(delta) + " max ratio " + fmt(r.measured_constant) + "; ";
    }
    return Outcome{ok, detail + (ok ? "0 violations" : "violations found")};
  });

  criterion(7, "main-theorem decay of sqrt(flat family)", 30.0, [] {
    const auto basis = build_basis(4, BoundaryMode::interior_only);
    std::vector<double> ratios;
    double min_reg = INFINITY;
    for (double delta : {0.02, 0.05, 0.1, 0.2}) {
      const auto f = FunctionSpec::flat_family(4.0, delta);
      const auto dec = decompose(sample_root(f, 0.5, 14), basis, 4);
      min_reg = std::min(min_reg, decay_fit(dec, 4, 11, true).regularity_estimate);
      ratios.push_back(besov_norm_estimate(dec, 2.0) / std::sqrt(flat_norm(f, 4.0, 12)));
    }
    const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::fabs(r / mean - 1.0));
    return Outcome{min_reg >= 1.8 && spread <= 0.25,
                   "min regularity " + fmt(min_reg) + ", Besov ratio deviation from mean " + fmt(spread)};
  });

  criterion(8, "square root of a double zero is only Lipschitz", 10.0, [] {
    const auto basis = build_basis(5, BoundaryMode::interior_only);
    const auto dec = decompose(sample_root(FunctionSpec::shifted_square(0.5), 0.5, 14), basis, kDefaultCoarseLevel);
    const double reg = decay_fit(dec, true).regularity_estimate;
    return Outcome{reg >= 0.85 && reg <= 1.2, "regularity " + fmt(reg)};
  });

  criterion(9, "wavelet reconstruction, moments and orthonormality", 10.0, [] {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> n(0.0, 1.0);
    double recon = 0.0, moments = 0.0, gram = 0.0;
    for (int S = 1; S <= 10; ++S) {
      const auto periodic = build_basis(S, BoundaryMode::periodized);
      std::vector<double> x(std::size_t{1} << 12);
      for (auto& v : x) v = n(rng);
      const auto y = reconstruct(decompose(x, periodic, 4));
      for (std::size_t i = 0; i < x.size(); ++i) recon = std::max(recon, std::fabs(x[i] - y[i]));

      const auto interior = build_basis(S, BoundaryMode::interior_only);
      const auto mono = S == 1 ? FunctionSpec::constant(1.0) : FunctionSpec::power(static_cast<double>(S - 1));
      const auto dec = decompose(sample(mono, 12), interior, 4);
      for (int j = dec.j_coarse; j < dec.j_max; ++j) moments = std::max(moments, level_sup(dec, j, true));

      const int J = 6;
      const std::size_t N = std::size_t{1} << J;
      const auto zero = decompose(std::vector<double>(N, 0.0), periodic, 2);
      std::vector<std::vector<double>> cols;
      for (std::size_t k = 0; k < zero.scaling_coeffs.size(); ++k) {
        auto d = zero;
        d.scaling_coeffs[k] = 1.0;
        cols.push_back(reconstruct(d));
      }
      for (const auto& [j, v] : zero.detail_coeffs) {
        for (std::size_t k = 0; k < v.size(); ++k) {
          auto d = zero;
          d.detail_coeffs[j][k] = 1.0;
          cols.push_back(reconstruct(d));
        }
      }
      for (std::size_t a = 0; a < cols.size(); ++a) {
        for (std::size_t b = a; b < cols.size(); ++b) {
          const double ip =
              std::inner_product(cols[a].begin(), cols[a].end(), cols[b].begin(), 0.0) / static_cast<double>(N);
          gram = std::max(gram, std::fabs(ip - (a == b ? 1.0 : 0.0)));
        }
      }
    }
    return Outcome{recon <= 1e-10 && moments <= 1e-9 && gram <= 1e-8,
                   "reconstruction error " + fmt(recon) + ", interior polynomial coefficients " + fmt(moments) +
                       ", Gram error " + fmt(gram)};
  });

  criterion(10, "proposition bounds on the flat family", 30.0, [] {
    const auto basis = build_basis(5, BoundaryMode::interior_only);
    bool ok = true;
    std::string detail;
    for (double delta : {0.05, 0.1, 0.2}) {
      const auto f = FunctionSpec::flat_family(4.0, delta);
      const auto r = prop_decay_check(f, 0.5, 4.0, basis, 14, 0.5);
      const auto jc = critical_level(f, 4.0, 0.5, basis.support_length(), r.flat_norm);
      const bool levels_ok = r.global.levels.front() == 4 && r.global.levels.back() == 11 && jc.has_value() &&
                             !r.local.levels.empty() && r.local.levels.front() == std::max(*jc, 4);
      const bool finite = std::isfinite(r.global.max_ratio) && std::isfinite(r.local.max_ratio);
      const bool stable = r.global.growth < 2.0 && r.local.growth < 2.0;
      ok = ok && levels_ok && finite && stable;
      detail += "delta " + fmt(delta) + ": global max " + fmt(r.global.max_ratio) + " growth " +
                fmt(r.global.growth) + ", local max " + fmt(r.local.max_ratio) + " growth " +
                fmt(r.local.growth) + ", local from j=" +
                (r.local.levels.empty() ? std::string("-") : std::to_string(r.local.levels.front())) + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(11, "suite determinism", 180.0, [] {
    const auto root = fs::temp_directory_path() / "holdercone_acceptance_suite";
    fs::remove_all(root);
    std::ostringstream out, err;
    const int a = run_cli({"holdercone", "suite", "--out", (root / "a").string()}, out, err);
    const int b = run_cli({"holdercone", "suite", "--out", (root / "b").string()}, out, err);
    const auto ja = slurp(root / "a" / "suite_report.json");
    const auto jb = slurp(root / "b" / "suite_report.json");
    bool allowed = false;
    for (const auto& r : nlohmann::json::parse(ja)) {
      if (r["claim_id"] == "FxFxRel" && r["family"] == "constant_one" && r["verdict"] == "fail" &&
          r["allow_listed"] == true) {
        allowed = true;
      }
    }
    const bool same = !ja.empty() && ja == jb && slurp(root / "a" / "suite_summary.csv") ==
                                                     slurp(root / "b" / "suite_summary.csv");
    return Outcome{a == 0 && b == 0 && same && allowed,
                   "exit codes " + std::to_string(a) + "/" + std::to_string(b) + ", reports " +
                       (same ? "identical" : "differ") + ", f = 1 boundary violation " +
                       (allowed ? "present and allow-listed" : "missing")};
  });

  std::printf("%s: %d of 11 criteria failed\n", g_failures == 0 ? "ALL PASS" : "SOME FAILED", g_failures);
  return g_failures == 0 ? 0 : 1;
}

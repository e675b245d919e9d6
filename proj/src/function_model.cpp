#include "holdercone/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "holdercone/errors.hpp"
#include "holdercone/report_io.hpp"

namespace holdercone {

namespace {

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

// gamma (gamma-1) ... (gamma-order+1)
double falling(double gamma, int order) {
  double c = 1.0;
  for (int i = 0; i < order; ++i) c *= gamma - i;
  return c;
}

// d^order/dx^order x^gamma on the real line. Integer exponents are
// polynomials; other exponents need x >= 0.
double power_term(double gamma, double x, int order) {
  if (is_integer(gamma) && order > gamma) return 0.0;
  if (x < 0.0 && !is_integer(gamma)) {
    throw DomainError("x^" + format_number(gamma) + " is undefined at x = " + format_number(x));
  }
  const double c = falling(gamma, order);
  if (c == 0.0) return 0.0;
  return c * std::pow(x, gamma - order);
}

int power_order_limit(double gamma) {
  return is_integer(gamma) ? kUnlimitedOrder : static_cast<int>(std::ceil(gamma));
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Finite-difference weights (Fornberg) for the derivative of the given
// order at `at` using the stencil offsets.
std::vector<double> fd_weights(const std::vector<double>& offsets, double at, int order) {
  const std::size_t n = offsets.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0] - at;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i] - at;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

double eval_impl(const FunctionSpec& spec, double x, int order, bool extended);

struct Evaluator {
  double x;
  int order;
  bool extended;

  double operator()(const Power& p) const { return power_term(p.gamma, x, order); }
  double operator()(const AffinePlus& a) const {
    if (order == 0) return x + a.q;
    return order == 1 ? 1.0 : 0.0;
  }
  double operator()(const Constant& c) const { return order == 0 ? c.c : 0.0; }
  double operator()(const ShiftedSquare& s) const {
    const double u = x - s.x0;
    switch (order) {
      case 0: return u * u;
      case 1: return 2.0 * u;
      case 2: return 2.0;
      default: return 0.0;
    }
  }
  double operator()(const FlatFamily& f) const {
    const double quad_coeff = std::pow(f.delta, f.beta - 2.0);
    double v = power_term(f.beta, x, order) + quad_coeff * power_term(2.0, x, order);
    if (order == 0) v += std::pow(f.delta, f.beta);
    return v;
  }
  double operator()(const ScaledSum& s) const {
    double v = 0.0;
    for (const auto& t : s.terms) {
      if (t.coeff == 0.0) continue;
      v += t.coeff * eval_impl(*t.function, x, order, extended);
    }
    return v;
  }
  double operator()(const Product& p) const {
    double v = 0.0;
    for (int r = 0; r <= order; ++r) {
      v += binomial(order, r) * eval_impl(*p.left, x, r, extended) *
           eval_impl(*p.right, x, order - r, extended);
    }
    return v;
  }
  double operator()(const Tabulated& t) const {
    const GridFunction& g = *t.grid;
    if (x < 0.0 || x > 1.0) {
      throw DomainError("tabulated function evaluated outside [0,1]");
    }
    const double pos = x / g.step();
    const auto last = g.size() - 1;
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= last) return g.nodal_derivative(last, order);
    const double frac = pos - static_cast<double>(i);
    const double lo = g.nodal_derivative(i, order);
    if (frac == 0.0) return lo;
    return (1.0 - frac) * lo + frac * g.nodal_derivative(i + 1, order);
  }
};

double eval_impl(const FunctionSpec& spec, double x, int order, bool extended) {
  if (order < 0) throw InvalidArgument("derivative order must be nonnegative");
  if (order > spec.max_exact_derivative()) {
    throw OrderUnavailable("derivative of order " + std::to_string(order) + " unavailable for " +
                           spec.describe());
  }
  return std::visit(Evaluator{x, order, extended}, spec.family());
}

}  // namespace

int strict_floor(double beta) {
  const double f = std::floor(beta);
  return static_cast<int>(f == beta ? f - 1.0 : f);
}

GridFunction::GridFunction(int level, std::vector<double> values)
    : level_(level), values_(std::move(values)) {
  if (level < 0 || level > kMaxGridLevel) {
    throw ResolutionError("grid level " + std::to_string(level) + " outside [0, 24]");
  }
  if (values_.size() != (std::size_t{1} << level) + 1) {
    throw InvalidArgument("grid of level " + std::to_string(level) + " needs 2^J + 1 values, got " +
                          std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("grid values must be finite");
  }
}

double GridFunction::step() const { return std::ldexp(1.0, -level_); }

double GridFunction::node(std::size_t i) const { return static_cast<double>(i) * step(); }

double GridFunction::nodal_derivative(std::size_t i, int order) const {
  if (order == 0) return values_[i];
  if (order < 0 || order > 4) throw OrderUnavailable("tabulated derivatives exist up to order 4");
  // Central stencils: 3 points for orders 1-2, 5 points for 3-4. One-sided
  // stencils near the ends use order + 2 points; all are second order.
  const int central = order <= 2 ? 3 : 5;
  const int one_sided = order + 2;
  const auto n = static_cast<long>(values_.size());
  const long half = central / 2;
  const long idx = static_cast<long>(i);
  long first;
  int width;
  if (idx - half >= 0 && idx + half < n) {
    first = idx - half;
    width = central;
  } else {
    width = one_sided;
    if (width > n) {
      throw OrderUnavailable("grid of level " + std::to_string(level_) + " too coarse for order " +
                             std::to_string(order));
    }
    first = std::clamp<long>(idx - width / 2, 0, n - width);
  }
  std::vector<double> offsets(width);
  for (int s = 0; s < width; ++s) offsets[s] = static_cast<double>(first + s - idx);
  const auto w = fd_weights(offsets, 0.0, order);
  double acc = 0.0;
  for (int s = 0; s < width; ++s) acc += w[s] * values_[first + s];
  return acc / std::pow(step(), order);
}

void write_csv(std::ostream& out, const GridFunction& g) {
  out << "x,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << format_number(g.node(i)) << ',' << format_number(g[i]) << '\n';
  }
}

GridFunction read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty grid CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") throw ParseError("grid CSV header must be 'x,value'");
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("grid CSV row without comma: " + line);
    try {
      std::stod(line.substr(0, comma));
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("grid CSV row " + std::to_string(row) + " is not numeric");
    }
    ++row;
  }
  if (values.size() < 2) throw ParseError("grid CSV needs at least two rows");
  const std::size_t intervals = values.size() - 1;
  if ((intervals & (intervals - 1)) != 0) {
    throw ParseError("grid CSV row count must be 2^J + 1");
  }
  int level = 0;
  while ((std::size_t{1} << level) < intervals) ++level;
  return GridFunction(level, std::move(values));
}

FunctionSpec FunctionSpec::power(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("power: gamma must be > 0");
  return FunctionSpec(Power{gamma});
}

FunctionSpec FunctionSpec::affine_plus(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("affine_plus: q must be > 0");
  return FunctionSpec(AffinePlus{q});
}

FunctionSpec FunctionSpec::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("constant: c must be >= 0");
  return FunctionSpec(Constant{c});
}

FunctionSpec FunctionSpec::shifted_square(double x0) {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw InvalidArgument("shifted_square: x0 must lie in [0,1]");
  return FunctionSpec(ShiftedSquare{x0});
}

FunctionSpec FunctionSpec::flat_family(double beta, double delta) {
  if (!(beta >= 2.0) || !std::isfinite(beta)) throw InvalidArgument("flat_family: beta must be >= 2");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("flat_family: delta must be >= 0");
  }
  return FunctionSpec(FlatFamily{beta, delta});
}

FunctionSpec FunctionSpec::scaled_sum(std::vector<std::pair<double, FunctionSpec>> terms) {
  if (terms.empty()) throw InvalidArgument("scaled_sum needs at least one term");
  ScaledSum s;
  s.terms.reserve(terms.size());
  for (auto& [coeff, f] : terms) {
    if (!std::isfinite(coeff)) throw InvalidArgument("scaled_sum: coefficients must be finite");
    s.terms.push_back({coeff, std::make_shared<const FunctionSpec>(std::move(f))});
  }
  return FunctionSpec(std::move(s));
}

FunctionSpec FunctionSpec::product(FunctionSpec left, FunctionSpec right) {
  return FunctionSpec(Product{std::make_shared<const FunctionSpec>(std::move(left)),
                              std::make_shared<const FunctionSpec>(std::move(right))});
}

FunctionSpec FunctionSpec::tabulated(GridFunction grid) {
  return FunctionSpec(Tabulated{std::make_shared<const GridFunction>(std::move(grid))});
}

int FunctionSpec::max_exact_derivative() const {
  struct Visitor {
    int operator()(const Power& p) const { return power_order_limit(p.gamma); }
    int operator()(const AffinePlus&) const { return kUnlimitedOrder; }
    int operator()(const Constant&) const { return kUnlimitedOrder; }
    int operator()(const ShiftedSquare&) const { return kUnlimitedOrder; }
    int operator()(const FlatFamily& f) const { return power_order_limit(f.beta); }
    int operator()(const ScaledSum& s) const {
      int m = kUnlimitedOrder;
      for (const auto& t : s.terms) m = std::min(m, t.function->max_exact_derivative());
      return m;
    }
    int operator()(const Product& p) const {
      return std::min(p.left->max_exact_derivative(), p.right->max_exact_derivative());
    }
    int operator()(const Tabulated&) const { return 4; }
  };
  return std::visit(Visitor{}, family_);
}

std::string FunctionSpec::describe() const {
  struct Visitor {
    std::string operator()(const Power& p) const { return "power(gamma=" + format_number(p.gamma) + ")"; }
    std::string operator()(const AffinePlus& a) const {
      return "affine_plus(q=" + format_number(a.q) + ")";
    }
    std::string operator()(const Constant& c) const { return "constant(c=" + format_number(c.c) + ")"; }
    std::string operator()(const ShiftedSquare& s) const {
      return "shifted_square(x0=" + format_number(s.x0) + ")";
    }
    std::string operator()(const FlatFamily& f) const {
      return "flat_family(beta=" + format_number(f.beta) + ",delta=" + format_number(f.delta) + ")";
    }
    std::string operator()(const ScaledSum& s) const {
      std::string out = "scaled_sum(";
      for (std::size_t i = 0; i < s.terms.size(); ++i) {
        if (i) out += " + ";
        out += format_number(s.terms[i].coeff) + "*" + s.terms[i].function->describe();
      }
      return out + ")";
    }
    std::string operator()(const Product& p) const {
      return "product(" + p.left->describe() + ", " + p.right->describe() + ")";
    }
    std::string operator()(const Tabulated& t) const {
      return "tabulated(level=" + std::to_string(t.grid->level()) + ")";
    }
  };
  return std::visit(Visitor{}, family_);
}

FunctionSpec scaled(double coeff, const FunctionSpec& f) {
  return FunctionSpec::scaled_sum({{coeff, f}});
}

FunctionSpec sum(const FunctionSpec& f, const FunctionSpec& g) {
  return FunctionSpec::scaled_sum({{1.0, f}, {1.0, g}});
}

double evaluate(const FunctionSpec& spec, double x, int order) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("evaluation point " + format_number(x) + " outside [0,1]");
  }
  return eval_impl(spec, x, order, false);
}

double evaluate_extended(const FunctionSpec& spec, double x, int order) {
  if (!std::isfinite(x)) throw DomainError("evaluation point must be finite");
  return eval_impl(spec, x, order, true);
}

GridFunction sample(const FunctionSpec& spec, int level) {
  if (level < 0 || level > kMaxGridLevel) {
    throw ResolutionError("grid level " + std::to_string(level) + " outside [0, 24]");
  }
  const std::size_t n = (std::size_t{1} << level) + 1;
  const double h = std::ldexp(1.0, -level);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = evaluate(spec, static_cast<double>(i) * h, 0);
  return GridFunction(level, std::move(values));
}

FunctionSpec antiderivative(const FunctionSpec& spec) {
  struct Visitor {
    FunctionSpec operator()(const Power& p) const {
      return scaled(1.0 / (p.gamma + 1.0), FunctionSpec::power(p.gamma + 1.0));
    }
    FunctionSpec operator()(const AffinePlus& a) const {
      return FunctionSpec::scaled_sum({{0.5, FunctionSpec::power(2.0)}, {a.q, FunctionSpec::power(1.0)}});
    }
    FunctionSpec operator()(const Constant& c) const {
      if (c.c == 1.0) return FunctionSpec::power(1.0);
      return scaled(c.c, FunctionSpec::power(1.0));
    }
    FunctionSpec operator()(const ShiftedSquare& s) const {
      // ((x - x0)^3 + x0^3) / 3 expanded around 0.
      std::vector<std::pair<double, FunctionSpec>> terms{{1.0 / 3.0, FunctionSpec::power(3.0)}};
      if (s.x0 != 0.0) {
        terms.emplace_back(-s.x0, FunctionSpec::power(2.0));
        terms.emplace_back(s.x0 * s.x0, FunctionSpec::power(1.0));
      }
      return FunctionSpec::scaled_sum(std::move(terms));
    }
    FunctionSpec operator()(const FlatFamily& f) const {
      std::vector<std::pair<double, FunctionSpec>> terms{
          {1.0 / (f.beta + 1.0), FunctionSpec::power(f.beta + 1.0)}};
      const double quad_coeff = std::pow(f.delta, f.beta - 2.0);
      if (quad_coeff != 0.0) terms.emplace_back(quad_coeff / 3.0, FunctionSpec::power(3.0));
      if (f.delta > 0.0) terms.emplace_back(std::pow(f.delta, f.beta), FunctionSpec::power(1.0));
      return FunctionSpec::scaled_sum(std::move(terms));
    }
    FunctionSpec operator()(const ScaledSum& s) const {
      std::vector<std::pair<double, FunctionSpec>> terms;
      for (const auto& t : s.terms) terms.emplace_back(t.coeff, antiderivative(*t.function));
      return FunctionSpec::scaled_sum(std::move(terms));
    }
    FunctionSpec operator()(const Product&) const {
      throw Unsupported("antiderivative of a product has no closed form here");
    }
    FunctionSpec operator()(const Tabulated&) const {
      throw Unsupported("antiderivative of tabulated data: use cumulative_trapezoid");
    }
  };
  return std::visit(Visitor{}, spec.family());
}

TrapezoidAntiderivative cumulative_trapezoid(const GridFunction& g) {
  std::vector<double> out(g.size(), 0.0);
  const double h = g.step();
  for (std::size_t i = 1; i < g.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
  return {GridFunction(g.level(), std::move(out)), std::ldexp(1.0, -2 * g.level())};
}

nlohmann::json to_json(const FunctionSpec& spec) {
  struct Visitor {
    nlohmann::json operator()(const Power& p) const { return {{"family", "power"}, {"gamma", p.gamma}}; }
    nlohmann::json operator()(const AffinePlus& a) const {
      return {{"family", "affine_plus"}, {"q", a.q}};
    }
    nlohmann::json operator()(const Constant& c) const { return {{"family", "constant"}, {"c", c.c}}; }
    nlohmann::json operator()(const ShiftedSquare& s) const {
      return {{"family", "shifted_square"}, {"x0", s.x0}};
    }
    nlohmann::json operator()(const FlatFamily& f) const {
      return {{"family", "flat_family"}, {"beta", f.beta}, {"delta", f.delta}};
    }
    nlohmann::json operator()(const ScaledSum& s) const {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : s.terms) terms.push_back({{"coeff", t.coeff}, {"function", to_json(*t.function)}});
      return {{"family", "scaled_sum"}, {"terms", terms}};
    }
    nlohmann::json operator()(const Product& p) const {
      return {{"family", "product"}, {"factors", {to_json(*p.left), to_json(*p.right)}}};
    }
    nlohmann::json operator()(const Tabulated& t) const {
      return {{"family", "tabulated"}, {"level", t.grid->level()}, {"values", t.grid->values()}};
    }
  };
  return std::visit(Visitor{}, spec.family());
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ParseError(std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

FunctionSpec function_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ParseError("function JSON must be an object with a string 'family'");
  }
  const auto family = j.at("family").get<std::string>();
  try {
    if (family == "power") return FunctionSpec::power(number_field(j, "gamma"));
    if (family == "affine_plus") return FunctionSpec::affine_plus(number_field(j, "q"));
    if (family == "constant") return FunctionSpec::constant(number_field(j, "c"));
    if (family == "shifted_square") return FunctionSpec::shifted_square(number_field(j, "x0"));
    if (family == "flat_family") {
      return FunctionSpec::flat_family(number_field(j, "beta"), number_field(j, "delta"));
    }
    if (family == "scaled_sum") {
      if (!j.contains("terms") || !j.at("terms").is_array()) throw ParseError("scaled_sum needs 'terms'");
      std::vector<std::pair<double, FunctionSpec>> terms;
      for (const auto& t : j.at("terms")) {
        if (!t.contains("function")) throw ParseError("scaled_sum term needs 'function'");
        terms.emplace_back(number_field(t, "coeff"), function_from_json(t.at("function")));
      }
      return FunctionSpec::scaled_sum(std::move(terms));
    }
    if (family == "product") {
      if (!j.contains("factors") || !j.at("factors").is_array() || j.at("factors").size() != 2) {
        throw ParseError("product needs exactly two 'factors'");
      }
      return FunctionSpec::product(function_from_json(j.at("factors")[0]),
                                   function_from_json(j.at("factors")[1]));
    }
    if (family == "tabulated") {
      if (!j.contains("values") || !j.at("values").is_array()) throw ParseError("tabulated needs 'values'");
      const int level = static_cast<int>(number_field(j, "level"));
      return FunctionSpec::tabulated(GridFunction(level, j.at("values").get<std::vector<double>>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed function JSON: ") + e.what());
  }
  throw ParseError("unknown function family '" + family + "'");
}

}  // namespace holdercone

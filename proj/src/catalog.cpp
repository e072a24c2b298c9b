#include "expsamp/catalog.hpp"

#include <cmath>
#include <numbers>

#include "expsamp/errors.hpp"

namespace expsamp {

namespace {

double parse_real(const std::string& text, const std::string& id) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + text + "' in function id '" + id + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError("cannot parse number '" + text + "' in function id '" + id + "'");
  }
  return v;
}

constexpr Rect kLogDomain{0.25, 4.0, 0.25, 4.0};

std::function<double(double, double)> constant_modulus(double value) {
  return [value](double, double) { return value; };
}

}  // namespace

std::vector<std::string> catalog_ids() {
  return {"sin-x2-y2", "y2-cos-pix", "log-sum", "log-product", "const:c", "pow:a:b"};
}

CatalogFunction function_from_id(const std::string& id) {
  CatalogFunction cf;
  cf.id = id;

  if (id == "sin-x2-y2") {
    cf.description = "sin(x^2 - y^2)";
    cf.function = {[](double x, double y) { return std::sin(x * x - y * y); }, {0.05, 2.0, 0.05, 2.0}};
    return cf;
  }
  if (id == "y2-cos-pix") {
    // Separable, so every mixed difference vanishes.
    cf.description = "y^2 + cos(pi x)";
    cf.function = {[](double x, double y) { return y * y + std::cos(std::numbers::pi * x); },
                   {1.0, 4.0, 1.0, 4.0}};
    cf.facts.mixed_modulus = constant_modulus(0.0);
    cf.facts.theta_b_mixed_modulus = constant_modulus(0.0);
    cf.facts.sup_theta_b = 0.0;
    return cf;
  }
  if (id == "log-sum") {
    cf.description = "log x + log y";
    cf.function = {[](double x, double y) { return std::log(x) + std::log(y); }, kLogDomain};
    cf.facts.log_modulus = [](double d1, double d2) { return d1 + d2; };
    cf.facts.mixed_modulus = constant_modulus(0.0);
    cf.facts.theta_b_mixed_modulus = constant_modulus(0.0);
    cf.facts.sup_theta_b = 0.0;
    return cf;
  }
  if (id == "log-product") {
    // Delta = (log s - log x)(log t - log y) exactly: omega_B = d1 d2, theta_B f = 1.
    cf.description = "log x * log y";
    cf.function = {[](double x, double y) { return std::log(x) * std::log(y); }, kLogDomain};
    cf.facts.mixed_modulus = [](double d1, double d2) { return d1 * d2; };
    cf.facts.theta_b_mixed_modulus = constant_modulus(0.0);
    cf.facts.sup_theta_b = 1.0;
    cf.facts.lipschitz_k = 1.0;
    return cf;
  }
  if (id.rfind("const:", 0) == 0) {
    const double c = parse_real(id.substr(6), id);
    cf.description = "constant " + id.substr(6);
    cf.function = {[c](double, double) { return c; }, kLogDomain};
    cf.facts.log_modulus = constant_modulus(0.0);
    cf.facts.mixed_modulus = constant_modulus(0.0);
    cf.facts.theta_b_mixed_modulus = constant_modulus(0.0);
    cf.facts.sup_theta_b = 0.0;
    return cf;
  }
  if (id.rfind("pow:", 0) == 0) {
    const std::string rest = id.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ConfigError("function id '" + id + "' must be pow:a:b");
    const double a = parse_real(rest.substr(0, colon), id);
    const double b = parse_real(rest.substr(colon + 1), id);
    cf.description = "x^a y^b";
    cf.function = {[a, b](double x, double y) { return std::pow(x, a) * std::pow(y, b); }, kLogDomain};
    return cf;
  }
  throw ConfigError("unknown function id '" + id + "'");
}

}  // namespace expsamp

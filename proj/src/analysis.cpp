#include "expsamp/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "expsamp/errors.hpp"

namespace expsamp {

namespace {

constexpr double kRoundingSlack = 1e-12;

double eval_checked(const TargetFunction& f, double x, double y) {
  const double v = f(x, y);
  if (!std::isfinite(v)) throw DomainError(fmt::format("target function is not finite at ({}, {})", x, y));
  return v;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(fmt::format("{} must be positive", what));
}

void require_delta(double d, const char* what) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError(fmt::format("{} must be nonnegative", what));
}

// f sampled on the plan's log grid, row-major in (i = x index, j = y index).
struct ProbeGrid {
  std::size_t n = 0;
  double hx = 0.0;
  double hy = 0.0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

ProbeGrid sample_probe(const TargetFunction& f, const ProbePlan& plan) {
  if (plan.points_per_axis == 0) throw ConfigError("probe plan has no points");
  if (!(plan.log_x1 >= plan.log_x0) || !(plan.log_y1 >= plan.log_y0)) {
    throw ConfigError("probe plan bounds are reversed");
  }
  ProbeGrid g;
  g.n = plan.points_per_axis;
  const double denom = g.n > 1 ? static_cast<double>(g.n - 1) : 1.0;
  g.hx = (plan.log_x1 - plan.log_x0) / denom;
  g.hy = (plan.log_y1 - plan.log_y0) / denom;
  g.values.resize(g.n * g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = std::exp(plan.log_x0 + g.hx * static_cast<double>(i));
    for (std::size_t j = 0; j < g.n; ++j) {
      g.values[i * g.n + j] = eval_checked(f, x, std::exp(plan.log_y0 + g.hy * static_cast<double>(j)));
    }
  }
  return g;
}

// Largest index offset whose log distance stays within delta.
std::size_t max_offset(double delta, double h, std::size_t n) {
  if (h <= 0.0 || n <= 1) return 0;
  const auto steps = static_cast<std::size_t>(std::floor(delta / h * (1.0 + 1e-12)));
  return std::min(steps, n - 1);
}

// Maximises |metric(i, j, i2, j2)| over probe pairs with i2 >= i. Both metrics
// used here are symmetric under swapping the two points, so that half suffices.
template <typename Metric>
ModulusEstimate maximise_pairs(const ProbeGrid& g, double delta1, double delta2, Metric&& metric) {
  ModulusEstimate est{delta1, delta2, 0.0, 0};
  const auto di_max = static_cast<long>(max_offset(delta1, g.hx, g.n));
  const auto dj_max = static_cast<long>(max_offset(delta2, g.hy, g.n));
  const auto n = static_cast<long>(g.n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      for (long di = 0; di <= di_max && i + di < n; ++di) {
        for (long dj = -dj_max; dj <= dj_max; ++dj) {
          const long j2 = j + dj;
          if (j2 < 0 || j2 >= n) continue;
          est.value = std::max(est.value, std::abs(metric(i, j, i + di, j2)));
          ++est.probe_count;
        }
      }
    }
  }
  return est;
}

}  // namespace

double mellin_derivative(const TargetFunction& f, double x, double y, unsigned h1, unsigned h2,
                         double step) {
  if (h1 + h2 > 2) {
    throw UnsupportedOrderError(
        fmt::format("Mellin derivative of order ({}, {}) is not supported", h1, h2));
  }
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("mellin_derivative: point must be positive");
  require_positive(step, "finite-difference step");

  const double s = std::log(x);
  const double t = std::log(y);
  auto F = [&](double ds, double dt) { return eval_checked(f, std::exp(s + ds), std::exp(t + dt)); };
  const double h = step;

  if (h1 == 0 && h2 == 0) return F(0.0, 0.0);
  if (h1 == 1 && h2 == 0) return (F(h, 0.0) - F(-h, 0.0)) / (2.0 * h);
  if (h1 == 0 && h2 == 1) return (F(0.0, h) - F(0.0, -h)) / (2.0 * h);
  if (h1 == 2) return (F(h, 0.0) - 2.0 * F(0.0, 0.0) + F(-h, 0.0)) / (h * h);
  if (h2 == 2) return (F(0.0, h) - 2.0 * F(0.0, 0.0) + F(0.0, -h)) / (h * h);
  return (F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4.0 * h * h);
}

double delta_mixed(const TargetFunction& f, double x, double y, double s, double t) {
  if (!(x > 0.0) || !(y > 0.0) || !(s > 0.0) || !(t > 0.0)) {
    throw DomainError("delta_mixed: all coordinates must be positive");
  }
  return f(x, y) - f(x, t) - f(s, y) + f(s, t);
}

double mellin_bogel_derivative(const TargetFunction& f, double x, double y, double step) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("mellin_bogel_derivative: point must be positive");
  require_positive(step, "finite-difference step");
  double sum = 0.0;
  for (const double ds : {step, -step}) {
    for (const double dt : {step, -step}) {
      sum += delta_mixed(f, x, y, x * std::exp(ds), y * std::exp(dt)) / (ds * dt);
    }
  }
  return sum / 4.0;
}

ProbePlan ProbePlan::over(const Rect& domain, std::size_t points_per_axis) {
  if (!(domain.x0 > 0.0) || !(domain.y0 > 0.0) || !(domain.x1 >= domain.x0) ||
      !(domain.y1 >= domain.y0)) {
    throw ConfigError("probe plan domain must be a rectangle in the positive quadrant");
  }
  return ProbePlan{std::log(domain.x0), std::log(domain.x1), std::log(domain.y0),
                   std::log(domain.y1), points_per_axis};
}

ModulusEstimate log_modulus(const TargetFunction& f, double delta1, double delta2,
                            const ProbePlan& probe) {
  require_delta(delta1, "delta1");
  require_delta(delta2, "delta2");
  const ProbeGrid g = sample_probe(f, probe);
  return maximise_pairs(g, delta1, delta2, [&g](long i, long j, long i2, long j2) {
    return g.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
           g.at(static_cast<std::size_t>(i2), static_cast<std::size_t>(j2));
  });
}

ModulusEstimate mixed_modulus_B(const TargetFunction& f, double delta1, double delta2,
                                const ProbePlan& probe) {
  require_delta(delta1, "delta1");
  require_delta(delta2, "delta2");
  const ProbeGrid g = sample_probe(f, probe);
  return maximise_pairs(g, delta1, delta2, [&g](long i, long j, long i2, long j2) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(j);
    const auto c = static_cast<std::size_t>(i2);
    const auto d = static_cast<std::size_t>(j2);
    return g.at(a, b) - g.at(a, d) - g.at(c, b) + g.at(c, d);
  });
}

double voronovskaya_residual(const BivariateKernel& kernel, const TargetFunction& f,
                             const SamplingConfig& cfg, double x, double y, double step) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("voronovskaya_residual: point must be positive");
  cfg.validate();
  if (!kernel.factor_x.compact() || !kernel.factor_y.compact()) {
    throw ConfigError("voronovskaya_residual: moment check needs a compactly supported kernel");
  }
  const int truncation =
      static_cast<int>(std::ceil(std::max(kernel.factor_x.log_support_radius(),
                                          kernel.factor_y.log_support_radius()))) + 1;
  // First moments are 1-periodic in each log coordinate; probe one period.
  constexpr std::array<double, 5> probes{0.0, 0.2, 0.45, 0.5, 0.8};
  for (double lu : probes) {
    for (double lv : probes) {
      const double m10 = algebraic_moment(kernel, 1, 0, std::exp(lu), std::exp(lv), truncation);
      const double m01 = algebraic_moment(kernel, 0, 1, std::exp(lu), std::exp(lv), truncation);
      if (std::abs(m10) > 1e-10 || std::abs(m01) > 1e-10) {
        throw PreconditionError(fmt::format(
            "kernel '{}' has nonvanishing first moments (m10 = {}, m01 = {})",
            kernel.factor_x.order_tag(), m10, m01));
      }
    }
  }
  const double approx = kantorovich_eval(kernel, f, cfg, x, y);
  const double fx = eval_checked(f, x, y);
  const double theta_sum = mellin_derivative(f, x, y, 1, 0, step) + mellin_derivative(f, x, y, 0, 1, step);
  return cfg.w * (approx - fx) - 0.5 * theta_sum;
}

double bound_thm33(const KernelMoments& m, double w, double delta1, double delta2, double omega) {
  require_positive(w, "w");
  require_positive(delta1, "delta1");
  require_positive(delta2, "delta2");
  if (!(omega >= 0.0)) throw DomainError("modulus must be nonnegative");
  const double m0 = m(0, 0);
  const double m10 = m(1, 0);
  const double m01 = m(0, 1);
  const double m11 = m(1, 1);
  const double lead = m0 * (1.0 + 1.0 / (2.0 * delta1 * w) + 1.0 / (2.0 * delta2 * w) +
                            1.0 / (4.0 * delta1 * delta2 * w * w));
  const double x_term = m10 / (delta1 * w) * (1.0 + 1.0 / (2.0 * w * delta1));
  const double y_term = m01 / (delta2 * w) * (1.0 + 1.0 / (2.0 * w * delta2));
  const double mixed = m11 / (delta1 * delta2 * w * w);
  return omega * (lead + x_term + y_term + mixed);
}

double kappa_constant(const KernelMoments& m) {
  return 9.0 * m(0, 0) + 6.0 * m(1, 0) + 6.0 * m(0, 1) + 4.0 * m(1, 1);
}

double bound_rmk34(const KernelMoments& m, double omega_at_1_over_w) {
  if (!(omega_at_1_over_w >= 0.0)) throw DomainError("modulus must be nonnegative");
  return kappa_constant(m) / 4.0 * omega_at_1_over_w;
}

GbsConstants gbs_continuous_constants(const KernelMoments& m, double w) {
  require_positive(w, "w");
  const double m00 = m(0, 0);
  const double m10 = m(1, 0);
  const double m01 = m(0, 1);
  const double m11 = m(1, 1);
  return GbsConstants{(m00 + 2.0 * m10) / (2.0 * w), (m00 + 2.0 * m01) / (2.0 * w),
                      (m00 + 2.0 * m10 + 2.0 * m01 + 4.0 * m11) / (4.0 * w * w)};
}

double bound_thm41(const KernelMoments& m, double w, double delta1, double delta2, double omega_b) {
  require_positive(delta1, "delta1");
  require_positive(delta2, "delta2");
  if (!(omega_b >= 0.0)) throw DomainError("mixed modulus must be nonnegative");
  const GbsConstants a = gbs_continuous_constants(m, w);
  return (1.0 + a.a1 / delta1 + a.a2 / delta2 + a.a3 / (delta1 * delta2)) * omega_b;
}

GbsDifferentiableConstants gbs_differentiable_constants(const KernelMoments& m, double w) {
  require_positive(w, "w");
  for (unsigned p1 = 0; p1 <= 2; ++p1) {
    for (unsigned p2 = 0; p2 <= 2; ++p2) {
      if (!m.has(p1, p2)) {
        throw ConfigError("Boegel-differentiable bound needs absolute moments up to order (2,2)");
      }
    }
  }
  const double w2 = w * w;
  GbsDifferentiableConstants e;
  e.e1 = (m(0, 0) + 2.0 * m(1, 0) + 2.0 * m(0, 1) + 4.0 * m(1, 1)) / (4.0 * w2);
  e.e2 = (m(0, 0) + 3.0 * m(2, 0) + 3.0 * m(1, 0) + 2.0 * m(0, 1) + 6.0 * m(2, 1) + 6.0 * m(1, 1)) /
         (6.0 * w2 * w);
  e.e3 = (m(0, 0) + 3.0 * m(0, 2) + 3.0 * m(0, 1) + 2.0 * m(1, 0) + 6.0 * m(1, 2) + 6.0 * m(1, 1)) /
         (6.0 * w2 * w);
  e.e4 = (m(0, 0) + 3.0 * m(2, 0) + 3.0 * m(0, 2) + 3.0 * m(1, 0) + 3.0 * m(0, 1) + 9.0 * m(2, 2) +
          9.0 * m(1, 2) + 9.0 * m(2, 1) + 9.0 * m(1, 1)) /
         (9.0 * w2 * w2);
  return e;
}

double bound_thm42(const KernelMoments& m, double w, double delta1, double delta2,
                   double omega_b_of_f, double omega_b_of_theta_b, double sup_theta_b) {
  require_positive(delta1, "delta1");
  require_positive(delta2, "delta2");
  if (!(omega_b_of_f >= 0.0) || !(omega_b_of_theta_b >= 0.0) || !(sup_theta_b >= 0.0)) {
    throw DomainError("moduli and sup norms must be nonnegative");
  }
  const GbsDifferentiableConstants e = gbs_differentiable_constants(m, w);
  return e.e1 * (3.0 * sup_theta_b + omega_b_of_f) +
         (e.e2 / delta1 + e.e3 / delta2 + e.e4 / (delta1 * delta2)) * omega_b_of_theta_b;
}

double bound_thm43(double lipschitz_k, const KernelMoments& m, double w) {
  require_positive(lipschitz_k, "Lipschitz constant K");
  require_positive(w, "w");
  return lipschitz_k / (4.0 * w * w) * (m(0, 0) + 2.0 * m(1, 0) + 2.0 * m(0, 1) + 4.0 * m(1, 1));
}

std::string to_string(BoundName b) {
  switch (b) {
    case BoundName::thm33: return "thm33";
    case BoundName::rmk34: return "rmk34";
    case BoundName::thm41: return "thm41";
    case BoundName::thm42: return "thm42";
    case BoundName::thm43: return "thm43";
  }
  return "unknown";
}

BoundName bound_from_string(const std::string& s) {
  for (BoundName b : {BoundName::thm33, BoundName::rmk34, BoundName::thm41, BoundName::thm42,
                      BoundName::thm43}) {
    if (to_string(b) == s) return b;
  }
  throw ConfigError("unknown bound '" + s + "' (expected thm33, rmk34, thm41, thm42 or thm43)");
}

BoundReport verify_bound(const BoundRequest& request, const BivariateKernel& kernel,
                         const TargetFunction& f, const FunctionFacts& facts,
                         const SamplingConfig& cfg) {
  return verify_bound(request, KernelMoments::compute(kernel, request.moment_resolution), kernel, f,
                      facts, cfg);
}

BoundReport verify_bound(const BoundRequest& request, const KernelMoments& moments,
                         const BivariateKernel& kernel, const TargetFunction& f,
                         const FunctionFacts& facts, const SamplingConfig& cfg) {
  cfg.validate();
  const double w = cfg.w;
  const double x = request.x;
  const double y = request.y;
  const double d1 = request.name == BoundName::rmk34 ? 1.0 / w : request.delta1.value_or(1.0 / w);
  const double d2 = request.name == BoundName::rmk34 ? 1.0 / w : request.delta2.value_or(1.0 / w);

  BoundReport report;
  report.bound_name = request.name;
  report.x = x;
  report.y = y;
  auto& c = report.constants;
  c["w"] = w;
  c["delta1"] = d1;
  c["delta2"] = d2;

  auto omega = [&] {
    if (facts.log_modulus) return facts.log_modulus(d1, d2);
    c["estimated_omega"] = 1.0;
    return log_modulus(f, d1, d2, request.probe).value;
  };
  auto omega_b = [&] {
    if (facts.mixed_modulus) return facts.mixed_modulus(d1, d2);
    c["estimated_omega_B"] = 1.0;
    return mixed_modulus_B(f, d1, d2, request.probe).value;
  };

  const double fxy = eval_checked(f, x, y);
  report.rounding_slack = kRoundingSlack * std::max(1.0, std::abs(fxy));
  c["rounding_slack"] = report.rounding_slack;
  switch (request.name) {
    case BoundName::thm33:
    case BoundName::rmk34: {
      report.measured = std::abs(kantorovich_eval(kernel, f, cfg, x, y) - fxy);
      const double om = omega();
      c["omega"] = om;
      c["kappa"] = kappa_constant(moments);
      report.theoretical = request.name == BoundName::rmk34 ? bound_rmk34(moments, om)
                                                            : bound_thm33(moments, w, d1, d2, om);
      break;
    }
    case BoundName::thm41: {
      report.measured = std::abs(gbs_eval(kernel, f, cfg, x, y) - fxy);
      const GbsConstants a = gbs_continuous_constants(moments, w);
      c["A1"] = a.a1;
      c["A2"] = a.a2;
      c["A3"] = a.a3;
      const double ob = omega_b();
      c["omega_B"] = ob;
      report.theoretical = bound_thm41(moments, w, d1, d2, ob);
      break;
    }
    case BoundName::thm42: {
      report.measured = std::abs(gbs_eval(kernel, f, cfg, x, y) - fxy);
      const GbsDifferentiableConstants e = gbs_differentiable_constants(moments, w);
      c["E1"] = e.e1;
      c["E2"] = e.e2;
      c["E3"] = e.e3;
      c["E4"] = e.e4;
      const double ob = omega_b();
      const TargetFunction theta_b{
          [&f](double s, double t) { return mellin_bogel_derivative(f, s, t); }, f.domain};
      double ob_theta = 0.0;
      if (facts.theta_b_mixed_modulus) {
        ob_theta = facts.theta_b_mixed_modulus(d1, d2);
      } else {
        c["estimated_omega_B_theta_B"] = 1.0;
        ob_theta = mixed_modulus_B(theta_b, d1, d2, request.probe).value;
      }
      double sup_theta = 0.0;
      if (facts.sup_theta_b) {
        sup_theta = *facts.sup_theta_b;
      } else {
        c["estimated_sup_theta_B"] = 1.0;
        const ProbeGrid g = sample_probe(theta_b, request.probe);
        for (double v : g.values) sup_theta = std::max(sup_theta, std::abs(v));
      }
      c["omega_B"] = ob;
      c["omega_B_theta_B"] = ob_theta;
      c["sup_theta_B"] = sup_theta;
      report.theoretical = bound_thm42(moments, w, d1, d2, ob, ob_theta, sup_theta);
      break;
    }
    case BoundName::thm43: {
      if (!facts.lipschitz_k) {
        throw PreconditionError("thm43 needs a caller-supplied Lipschitz constant K");
      }
      report.measured = std::abs(gbs_eval(kernel, f, cfg, x, y) - fxy);
      c["K"] = *facts.lipschitz_k;
      report.theoretical = bound_thm43(*facts.lipschitz_k, moments, w);
      break;
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const BoundReport& report) {
  j = nlohmann::json{{"bound_name", to_string(report.bound_name)},
                     {"point", {report.x, report.y}},
                     {"theoretical", report.theoretical},
                     {"measured", report.measured},
                     {"constants", report.constants},
                     {"verdict", report.pass() ? "PASS" : "FAIL"}};
}

}  // namespace expsamp

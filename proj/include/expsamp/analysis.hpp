#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "expsamp/kernels.hpp"
#include "expsamp/operators.hpp"

namespace expsamp {

inline constexpr double kDefaultMellinStep = 1e-4;

/// Mellin derivative theta_x^{h1} theta_y^{h2} f at (x, y), h1 + h2 <= 2.
///
/// theta_x = x d/dx is d/ds for F(s, t) = f(e^s, e^t), so this is a second
/// order central difference of F with spacing `step` in log scale.
double mellin_derivative(const TargetFunction& f, double x, double y, unsigned h1, unsigned h2,
                         double step = kDefaultMellinStep);

/// Mellin Boegel derivative theta_B f: the limit of
/// Delta f[s,t;x,y] / ((log s - log x)(log t - log y)), taken with offsets +-step.
double mellin_bogel_derivative(const TargetFunction& f, double x, double y,
                               double step = kDefaultMellinStep);

/// f(x,y) - f(x,t) - f(s,y) + f(s,t). DomainError for nonpositive inputs.
double delta_mixed(const TargetFunction& f, double x, double y, double s, double t);

/// Uniform grid in log coordinates over [s0, s1] x [t0, t1] with n points per
/// axis. Moduli are maximised over pairs of grid points, so for a fixed plan the
/// admissible pair sets are nested in (delta1, delta2).
struct ProbePlan {
  double log_x0 = 0.0;
  double log_x1 = 0.0;
  double log_y0 = 0.0;
  double log_y1 = 0.0;
  std::size_t points_per_axis = 0;

  /// Plan covering a rectangle of the positive quadrant.
  static ProbePlan over(const Rect& domain, std::size_t points_per_axis);
};

struct ModulusEstimate {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double value = 0.0;
  std::size_t probe_count = 0;  // number of point pairs examined
};

/// Grid estimate of the logarithmic modulus of continuity
///   sup |f(x,y) - f(u,v)|, |log x - log u| <= delta1, |log y - log v| <= delta2.
/// Always a lower bound on the true modulus.
ModulusEstimate log_modulus(const TargetFunction& f, double delta1, double delta2,
                            const ProbePlan& probe);

/// Grid estimate of the Mellin mixed modulus omega_B (sup of |delta_mixed|).
/// Also a lower bound. The constraint is taken closed; for continuous f the sup
/// over the open box is the same.
ModulusEstimate mixed_modulus_B(const TargetFunction& f, double delta1, double delta2,
                                const ProbePlan& probe);

/// w [(I_w f)(x,y) - f(x,y)] - (theta_x f + theta_y f)(x,y) / 2.
/// PreconditionError unless m_{1,0} = m_{0,1} = 0 for the kernel.
double voronovskaya_residual(const BivariateKernel& kernel, const TargetFunction& f,
                             const SamplingConfig& cfg, double x, double y,
                             double step = kDefaultMellinStep);

/// Quantitative estimate for the Kantorovich series with log modulus omega.
double bound_thm33(const KernelMoments& moments, double w, double delta1, double delta2,
                   double omega);

/// kappa = 9 M0 + 6 M10 + 6 M01 + 4 M11.
double kappa_constant(const KernelMoments& moments);

/// The delta = 1/w specialisation: (kappa / 4) * omega(f, 1/w, 1/w).
double bound_rmk34(const KernelMoments& moments, double omega_at_1_over_w);

struct GbsConstants {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};
GbsConstants gbs_continuous_constants(const KernelMoments& moments, double w);

/// GBS estimate for Mellin B-continuous f.
double bound_thm41(const KernelMoments& moments, double w, double delta1, double delta2,
                   double omega_b);

struct GbsDifferentiableConstants {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
};
/// Needs every M_{p1,p2} with p1, p2 <= 2 (ConfigError otherwise).
GbsDifferentiableConstants gbs_differentiable_constants(const KernelMoments& moments, double w);

/// GBS estimate for Mellin B-differentiable f:
///   E1 (3 sup|theta_B f| + omega_B(f)) + (E2/d1 + E3/d2 + E4/(d1 d2)) omega_B(theta_B f).
double bound_thm42(const KernelMoments& moments, double w, double delta1, double delta2,
                   double omega_b_of_f, double omega_b_of_theta_b, double sup_theta_b);

/// GBS estimate for the Lipschitz class with constant K > 0.
double bound_thm43(double lipschitz_k, const KernelMoments& moments, double w);

enum class BoundName { thm33, rmk34, thm41, thm42, thm43 };

std::string to_string(BoundName b);
BoundName bound_from_string(const std::string& s);

/// Quantities a bound needs about f. Any value left empty is estimated on
/// `probe` (a lower bound, reported via the "estimated_*" constants).
struct FunctionFacts {
  std::function<double(double, double)> log_modulus;    // (d1, d2) -> omega
  std::function<double(double, double)> mixed_modulus;  // (d1, d2) -> omega_B
  std::function<double(double, double)> theta_b_mixed_modulus;
  std::optional<double> sup_theta_b;
  std::optional<double> lipschitz_k;
};

struct BoundRequest {
  BoundName name = BoundName::rmk34;
  double x = 1.0;
  double y = 1.0;
  std::optional<double> delta1;  // default 1/w; rmk34 always uses 1/w
  std::optional<double> delta2;
  ProbePlan probe{};
  unsigned moment_resolution = 256;
};

struct BoundReport {
  BoundName bound_name = BoundName::rmk34;
  double theoretical = 0.0;
  double measured = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::map<std::string, double> constants;
  /// Floating-point allowance on the comparison, 1e-12 max(1, |f(x,y)|).
  double rounding_slack = 0.0;

  bool pass() const { return measured <= theoretical + rounding_slack; }
};

/// Measured error (Kantorovich for thm33/rmk34, GBS for thm41-43) against the
/// theoretical right-hand side. Pass iff measured <= theoretical + rounding_slack.
BoundReport verify_bound(const BoundRequest& request, const BivariateKernel& kernel,
                         const TargetFunction& f, const FunctionFacts& facts,
                         const SamplingConfig& cfg);

/// Same, with precomputed kernel moments.
BoundReport verify_bound(const BoundRequest& request, const KernelMoments& moments,
                         const BivariateKernel& kernel, const TargetFunction& f,
                         const FunctionFacts& facts, const SamplingConfig& cfg);

void to_json(nlohmann::json& j, const BoundReport& report);

}  // namespace expsamp

#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace expsamp {

/// Support radius value for kernels that are not compactly supported.
inline constexpr double kUnboundedSupport = std::numeric_limits<double>::infinity();

/// Univariate kernel chi on the positive half-line.
///
/// Kernels are stored in log coordinates: `profile(t)` returns chi(e^t). The
/// sampling operators only ever need chi(e^{w log x - k}), so evaluating in log
/// coordinates avoids an exp/log round trip per lattice cell.
class UnivariateKernel {
 public:
  using LogProfile = std::function<double(double)>;

  UnivariateKernel(LogProfile profile, double log_support_radius, std::string order_tag);

  /// chi(x) for x > 0; DomainError otherwise.
  double operator()(double x) const;

  /// chi(e^t) for any real t.
  double at_log(double t) const { return profile_(t); }

  /// R with chi(x) = 0 whenever |log x| > R (kUnboundedSupport if none).
  double log_support_radius() const { return log_support_radius_; }
  bool compact() const { return log_support_radius_ < kUnboundedSupport; }
  const std::string& order_tag() const { return order_tag_; }

 private:
  LogProfile profile_;
  double log_support_radius_;
  std::string order_tag_;
};

/// Tensor-product kernel chi(x) * chi(y).
struct BivariateKernel {
  UnivariateKernel factor_x;
  UnivariateKernel factor_y;

  double at_log(double s, double t) const { return factor_x.at_log(s) * factor_y.at_log(t); }
};

/// Mellin B-spline of order n evaluated at x > 0:
///
///   (1/(n-1)!) sum_{j=0}^{n} (-1)^j C(n,j) (n/2 + log x - j)_+^{n-1}
///
/// Support is |log x| < n/2. Order 1 is the indicator of [-1/2, 1/2) in log
/// coordinates (half-open, so integer shifts form an exact partition of unity).
///
/// The Mellin transform of this kernel is (sin(s/2)/(s/2))^n on the line
/// c + is; it is never needed numerically here.
double bspline_eval(unsigned n, double x);

/// Same as bspline_eval but takes t = log x directly.
double bspline_eval_log(unsigned n, double t);

UnivariateKernel make_mellin_bspline(unsigned n);

/// Tensor kernel built from one univariate factor used on both axes.
BivariateKernel make_tensor_kernel(const UnivariateKernel& factor);

/// Parses identifiers of the form "mbspline:n" (n >= 1). ConfigError otherwise.
BivariateKernel kernel_from_id(const std::string& id);

/// chi(x) chi(y); DomainError for nonpositive coordinates.
double kernel_eval_biv(const BivariateKernel& kernel, double x, double y);

/// Discrete algebraic moment
///   sum_k sum_j chi(e^{-k} u, e^{-j} v) (k - log u)^p1 (j - log v)^p2
/// over lattice indices within `truncation` cells of (log u, log v).
/// Requires p1 + p2 <= 2; for compact kernels truncation >= ceil(R).
double algebraic_moment(const BivariateKernel& kernel, unsigned p1, unsigned p2, double u,
                        double v, int truncation);

/// Supremum over (log u, log v) in a probe_resolution^2 grid on [0,1)^2 of the
/// absolute moment sum. The lattice sum is 1-periodic in each log coordinate, so
/// the unit square covers every (u, v).
///
/// Orders with p1, p2 <= 2 are supported (the |p| <= 2 moments plus the mixed
/// ones up to (2,2) needed by the Boegel-differentiable bound).
double absolute_moment_sup(const BivariateKernel& kernel, unsigned p1, unsigned p2,
                           unsigned probe_resolution);

/// Absolute moment suprema M_{p1,p2} for 0 <= p1, p2 <= max_order.
class KernelMoments {
 public:
  KernelMoments() = default;

  /// Directly from known values (p1, p2 <= 2).
  void set(unsigned p1, unsigned p2, double value);
  bool has(unsigned p1, unsigned p2) const;
  /// ConfigError if the moment was not computed.
  double operator()(unsigned p1, unsigned p2) const;

  /// M_eta = max over |p| = eta; every order with |p| = eta must be present.
  double max_of_order(unsigned eta) const;

  static KernelMoments compute(const BivariateKernel& kernel, unsigned probe_resolution,
                               unsigned max_component_order = 2);

 private:
  std::array<std::array<std::optional<double>, 3>, 3> values_{};
};

struct AlgebraicMomentSample {
  double log_u = 0.0;
  double log_v = 0.0;
  double value = 0.0;
};

struct AlgebraicMomentTable {
  unsigned p1 = 0;
  unsigned p2 = 0;
  std::vector<AlgebraicMomentSample> samples;
};

struct AbsoluteMomentEntry {
  unsigned p1 = 0;
  unsigned p2 = 0;
  double value = 0.0;
};

struct TailEntry {
  unsigned p1 = 0;
  unsigned p2 = 0;
  double gamma = 0.0;
  double value = 0.0;  // sup over the probe grid
};

struct MomentReport {
  std::vector<AlgebraicMomentTable> algebraic;
  std::vector<AbsoluteMomentEntry> absolute_sup;
  double k1_max_deviation = 0.0;
  std::vector<TailEntry> k2_tail;
  bool k1_pass = false;
  bool k2_pass = false;

  double absolute(unsigned p1, unsigned p2) const;
};

/// Fills a MomentReport. K1 passes iff the partition-of-unity deviation is
/// within tol; K2 passes iff M_2 is finite and every |p| = 2 tail at the largest
/// gamma is within tol.
MomentReport check_admissibility(const BivariateKernel& kernel, unsigned probe_resolution,
                                 std::span<const double> gamma_ladder, double tol);

void to_json(nlohmann::json& j, const MomentReport& report);

}  // namespace expsamp

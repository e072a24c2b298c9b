#include "expsamp/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include <nlohmann/json.hpp>

#include "expsamp/errors.hpp"

namespace expsamp {

namespace {

// (base)_+^exponent with the x_+^0 = [x >= 0] convention.
double truncated_power(double base, unsigned exponent) {
  if (base < 0.0) return 0.0;
  if (exponent == 0) return 1.0;
  return std::pow(base, static_cast<double>(exponent));
}

double binomial(unsigned n, unsigned k) {
  double c = 1.0;
  for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

double int_pow(double base, unsigned p) {
  double r = 1.0;
  for (unsigned i = 0; i < p; ++i) r *= base;
  return r;
}

int default_truncation(const UnivariateKernel& k) {
  if (!k.compact()) {
    throw ConfigError("kernel '" + k.order_tag() +
                      "' has unbounded support; lattice sums need an explicit truncation");
  }
  return static_cast<int>(std::ceil(k.log_support_radius())) + 1;
}

// |chi(e^{s-k})| and |k - s|^p for the lattice indices around s.
struct AxisTerms {
  std::vector<double> kernel;  // signed chi values
  std::vector<double> offset;  // k - s
};

AxisTerms axis_terms(const UnivariateKernel& factor, double s, int truncation) {
  AxisTerms terms;
  const long lo = static_cast<long>(std::floor(s)) - truncation;
  const long hi = static_cast<long>(std::ceil(s)) + truncation;
  for (long k = lo; k <= hi; ++k) {
    terms.kernel.push_back(factor.at_log(s - static_cast<double>(k)));
    terms.offset.push_back(static_cast<double>(k) - s);
  }
  return terms;
}

void check_order(unsigned p1, unsigned p2, unsigned max_total, const char* who) {
  if (p1 + p2 > max_total) {
    throw ConfigError(std::string(who) + ": moment order (" + std::to_string(p1) + "," +
                      std::to_string(p2) + ") exceeds the supported range");
  }
}

double probe_coordinate(unsigned i, unsigned resolution) {
  return static_cast<double>(i) / static_cast<double>(resolution);
}

}  // namespace

UnivariateKernel::UnivariateKernel(LogProfile profile, double log_support_radius,
                                   std::string order_tag)
    : profile_(std::move(profile)),
      log_support_radius_(log_support_radius),
      order_tag_(std::move(order_tag)) {
  if (!profile_) throw ConfigError("UnivariateKernel: empty evaluator");
  if (!(log_support_radius_ >= 0.0)) {
    throw ConfigError("UnivariateKernel: support radius must be nonnegative");
  }
}

double UnivariateKernel::operator()(double x) const {
  if (!(x > 0.0)) throw DomainError("kernel evaluated at nonpositive x");
  return profile_(std::log(x));
}

double bspline_eval_log(unsigned n, double t) {
  if (n == 0) throw DomainError("bspline_eval: order must be >= 1");
  const double half = n / 2.0;
  if (t >= half || t < -half) return 0.0;
  double sum = 0.0;
  for (unsigned j = 0; j <= n; ++j) {
    const double term = binomial(n, j) * truncated_power(half + t - j, n - 1);
    sum += (j % 2 == 0) ? term : -term;
  }
  return sum / factorial(n - 1);
}

double bspline_eval(unsigned n, double x) {
  if (n == 0) throw DomainError("bspline_eval: order must be >= 1");
  if (!(x > 0.0)) throw DomainError("bspline_eval: x must be positive");
  return bspline_eval_log(n, std::log(x));
}

UnivariateKernel make_mellin_bspline(unsigned n) {
  if (n == 0) throw DomainError("Mellin B-spline order must be >= 1");
  return UnivariateKernel([n](double t) { return bspline_eval_log(n, t); }, n / 2.0,
                          "mellin-bspline-" + std::to_string(n));
}

BivariateKernel make_tensor_kernel(const UnivariateKernel& factor) {
  return BivariateKernel{factor, factor};
}

BivariateKernel kernel_from_id(const std::string& id) {
  constexpr std::string_view prefix = "mbspline:";
  if (id.rfind(prefix, 0) != 0) throw ConfigError("unknown kernel id '" + id + "'");
  const std::string_view digits = std::string_view(id).substr(prefix.size());
  unsigned n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || n == 0 || n > 20) {
    throw ConfigError("invalid B-spline order in kernel id '" + id + "'");
  }
  return make_tensor_kernel(make_mellin_bspline(n));
}

double kernel_eval_biv(const BivariateKernel& kernel, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("kernel_eval_biv: coordinates must be positive");
  return kernel.factor_x(x) * kernel.factor_y(y);
}

double algebraic_moment(const BivariateKernel& kernel, unsigned p1, unsigned p2, double u,
                        double v, int truncation) {
  check_order(p1, p2, 2, "algebraic_moment");
  if (!(u > 0.0) || !(v > 0.0)) throw DomainError("algebraic_moment: u, v must be positive");
  if (truncation < 0) throw ConfigError("algebraic_moment: truncation must be nonnegative");
  for (const auto* f : {&kernel.factor_x, &kernel.factor_y}) {
    if (f->compact() && truncation < static_cast<int>(std::ceil(f->log_support_radius()))) {
      throw ConfigError("algebraic_moment: truncation does not cover the kernel support");
    }
  }
  const double lu = std::log(u);
  const double lv = std::log(v);
  const long k_lo = static_cast<long>(std::floor(lu)) - truncation;
  const long k_hi = static_cast<long>(std::ceil(lu)) + truncation;
  const long j_lo = static_cast<long>(std::floor(lv)) - truncation;
  const long j_hi = static_cast<long>(std::ceil(lv)) + truncation;
  double sum = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double dk = static_cast<double>(k) - lu;
    for (long j = j_lo; j <= j_hi; ++j) {
      const double dj = static_cast<double>(j) - lv;
      sum += kernel.at_log(lu - static_cast<double>(k), lv - static_cast<double>(j)) *
             int_pow(dk, p1) * int_pow(dj, p2);
    }
  }
  return sum;
}

double absolute_moment_sup(const BivariateKernel& kernel, unsigned p1, unsigned p2,
                           unsigned probe_resolution) {
  if (p1 > 2 || p2 > 2) {
    throw ConfigError("absolute_moment_sup: per-axis moment order must be <= 2");
  }
  if (probe_resolution == 0) throw ConfigError("absolute_moment_sup: probe_resolution must be > 0");
  const int tx = default_truncation(kernel.factor_x);
  const int ty = default_truncation(kernel.factor_y);

  std::vector<AxisTerms> rows;
  rows.reserve(probe_resolution);
  for (unsigned i = 0; i < probe_resolution; ++i) {
    rows.push_back(axis_terms(kernel.factor_x, probe_coordinate(i, probe_resolution), tx));
  }
  std::vector<AxisTerms> cols;
  cols.reserve(probe_resolution);
  for (unsigned j = 0; j < probe_resolution; ++j) {
    cols.push_back(axis_terms(kernel.factor_y, probe_coordinate(j, probe_resolution), ty));
  }

  double sup = 0.0;
  for (const auto& r : rows) {
    for (const auto& c : cols) {
      double sum = 0.0;
      for (std::size_t a = 0; a < r.kernel.size(); ++a) {
        const double wx = std::abs(r.kernel[a]) * int_pow(std::abs(r.offset[a]), p1);
        for (std::size_t b = 0; b < c.kernel.size(); ++b) {
          sum += wx * std::abs(c.kernel[b]) * int_pow(std::abs(c.offset[b]), p2);
        }
      }
      sup = std::max(sup, sum);
    }
  }
  return sup;
}

void KernelMoments::set(unsigned p1, unsigned p2, double value) {
  if (p1 > 2 || p2 > 2) throw ConfigError("KernelMoments: orders above 2 are not stored");
  values_[p1][p2] = value;
}

bool KernelMoments::has(unsigned p1, unsigned p2) const {
  return p1 <= 2 && p2 <= 2 && values_[p1][p2].has_value();
}

double KernelMoments::operator()(unsigned p1, unsigned p2) const {
  if (!has(p1, p2)) {
    throw ConfigError("absolute moment M_{" + std::to_string(p1) + "," + std::to_string(p2) +
                      "} was not computed");
  }
  return *values_[p1][p2];
}

double KernelMoments::max_of_order(unsigned eta) const {
  double m = 0.0;
  for (unsigned p1 = 0; p1 <= eta; ++p1) m = std::max(m, (*this)(p1, eta - p1));
  return m;
}

KernelMoments KernelMoments::compute(const BivariateKernel& kernel, unsigned probe_resolution,
                                     unsigned max_component_order) {
  if (max_component_order > 2) throw ConfigError("KernelMoments: max order is 2 per axis");
  KernelMoments m;
  for (unsigned p1 = 0; p1 <= max_component_order; ++p1) {
    for (unsigned p2 = 0; p2 <= max_component_order; ++p2) {
      m.set(p1, p2, absolute_moment_sup(kernel, p1, p2, probe_resolution));
    }
  }
  return m;
}

double MomentReport::absolute(unsigned p1, unsigned p2) const {
  for (const auto& e : absolute_sup) {
    if (e.p1 == p1 && e.p2 == p2) return e.value;
  }
  throw ConfigError("MomentReport: no absolute moment for the requested order");
}

MomentReport check_admissibility(const BivariateKernel& kernel, unsigned probe_resolution,
                                 std::span<const double> gamma_ladder, double tol) {
  if (probe_resolution == 0) throw ConfigError("check_admissibility: probe_resolution must be > 0");
  if (gamma_ladder.empty()) throw ConfigError("check_admissibility: empty gamma ladder");
  if (!(tol > 0.0)) throw ConfigError("check_admissibility: tol must be positive");
  for (double g : gamma_ladder) {
    if (!(g > 0.0)) throw ConfigError("check_admissibility: gamma values must be positive");
  }
  const int tx = default_truncation(kernel.factor_x);
  const int ty = default_truncation(kernel.factor_y);

  constexpr std::array<std::array<unsigned, 2>, 6> orders{
      {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

  MomentReport report;

  for (const auto& [p1, p2] : orders) {
    report.absolute_sup.push_back({p1, p2, absolute_moment_sup(kernel, p1, p2, probe_resolution)});
  }

  // Algebraic moments are tabulated on a coarse sub-grid of the unit square.
  const unsigned coarse = std::min(probe_resolution, 8u);
  const int trunc = std::max(tx, ty);
  for (const auto& [p1, p2] : orders) {
    AlgebraicMomentTable table{p1, p2, {}};
    for (unsigned i = 0; i < coarse; ++i) {
      for (unsigned j = 0; j < coarse; ++j) {
        const double lu = probe_coordinate(i, coarse);
        const double lv = probe_coordinate(j, coarse);
        table.samples.push_back(
            {lu, lv, algebraic_moment(kernel, p1, p2, std::exp(lu), std::exp(lv), trunc)});
      }
    }
    report.algebraic.push_back(std::move(table));
  }

  std::vector<double> ladder(gamma_ladder.begin(), gamma_ladder.end());
  std::sort(ladder.begin(), ladder.end());
  std::vector<double> tails(orders.size() * ladder.size(), 0.0);

  double k1_dev = 0.0;
  for (unsigned i = 0; i < probe_resolution; ++i) {
    const double lu = probe_coordinate(i, probe_resolution);
    const AxisTerms r = axis_terms(kernel.factor_x, lu, tx);
    for (unsigned j = 0; j < probe_resolution; ++j) {
      const double lv = probe_coordinate(j, probe_resolution);
      const AxisTerms c = axis_terms(kernel.factor_y, lv, ty);
      double partition = 0.0;
      std::vector<double> point_tails(tails.size(), 0.0);
      for (std::size_t a = 0; a < r.kernel.size(); ++a) {
        for (std::size_t b = 0; b < c.kernel.size(); ++b) {
          const double chi = r.kernel[a] * c.kernel[b];
          partition += chi;
          if (chi == 0.0) continue;
          const double dist2 = r.offset[a] * r.offset[a] + c.offset[b] * c.offset[b];
          for (std::size_t o = 0; o < orders.size(); ++o) {
            const double term = std::abs(chi) * int_pow(std::abs(r.offset[a]), orders[o][0]) *
                                int_pow(std::abs(c.offset[b]), orders[o][1]);
            for (std::size_t g = 0; g < ladder.size(); ++g) {
              // Outside the open ball B_gamma(log u, log v).
              if (dist2 >= ladder[g] * ladder[g]) point_tails[o * ladder.size() + g] += term;
            }
          }
        }
      }
      k1_dev = std::max(k1_dev, std::abs(partition - 1.0));
      for (std::size_t idx = 0; idx < tails.size(); ++idx) {
        tails[idx] = std::max(tails[idx], point_tails[idx]);
      }
    }
  }
  report.k1_max_deviation = k1_dev;
  for (std::size_t o = 0; o < orders.size(); ++o) {
    for (std::size_t g = 0; g < ladder.size(); ++g) {
      report.k2_tail.push_back({orders[o][0], orders[o][1], ladder[g], tails[o * ladder.size() + g]});
    }
  }

  report.k1_pass = k1_dev <= tol;
  bool k2 = true;
  for (const auto& e : report.absolute_sup) {
    if (e.p1 + e.p2 == 2 && !std::isfinite(e.value)) k2 = false;
  }
  for (const auto& t : report.k2_tail) {
    if (t.gamma == ladder.back() && !(t.value <= tol)) k2 = false;
  }
  report.k2_pass = k2;
  return report;
}

void to_json(nlohmann::json& j, const MomentReport& report) {
  auto algebraic = nlohmann::json::array();
  for (const auto& table : report.algebraic) {
    auto samples = nlohmann::json::array();
    for (const auto& s : table.samples) samples.push_back({s.log_u, s.log_v, s.value});
    algebraic.push_back({{"p", {table.p1, table.p2}}, {"samples", samples}});
  }
  auto absolute = nlohmann::json::array();
  for (const auto& e : report.absolute_sup) {
    absolute.push_back({{"p", {e.p1, e.p2}}, {"value", e.value}});
  }
  auto tails = nlohmann::json::array();
  for (const auto& t : report.k2_tail) {
    tails.push_back({{"p", {t.p1, t.p2}}, {"gamma", t.gamma}, {"value", t.value}});
  }
  j = nlohmann::json{{"algebraic", algebraic},
                     {"absolute_sup", absolute},
                     {"k1_max_deviation", report.k1_max_deviation},
                     {"k2_tail", tails}};
}

}  // namespace expsamp

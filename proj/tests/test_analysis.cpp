#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "expsamp/analysis.hpp"
#include "expsamp/catalog.hpp"
#include "expsamp/errors.hpp"

using namespace expsamp;
using doctest::Approx;

namespace {

TargetFunction fn(std::function<double(double, double)> f) { return TargetFunction{std::move(f), {0.25, 4.0, 0.25, 4.0}}; }

KernelMoments hat_moments() {
  KernelMoments m;
  // Closed-form sup values for the order-2 tensor kernel.
  const double axis[3] = {1.0, 0.5, 0.25};
  for (unsigned p1 = 0; p1 <= 2; ++p1) {
    for (unsigned p2 = 0; p2 <= 2; ++p2) m.set(p1, p2, axis[p1] * axis[p2]);
  }
  return m;
}

}  // namespace

TEST_CASE("mellin_derivative closed forms") {
  const TargetFunction logx = fn([](double x, double) { return std::log(x); });
  const TargetFunction power = fn([](double x, double y) { return std::pow(x, 1.5) * std::pow(y, -0.5); });
  const TargetFunction c = fn([](double, double) { return 2.0; });
  for (auto [x, y] : {std::pair{0.5, 1.2}, std::pair{1.0, 1.0}, std::pair{3.0, 0.7}}) {
    CHECK(mellin_derivative(logx, x, y, 1, 0) == Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(mellin_derivative(logx, x, y, 0, 1)) <= 1e-9);
    CHECK(std::abs(mellin_derivative(logx, x, y, 2, 0)) <= 1e-6);
    const double p = power(x, y);
    CHECK(mellin_derivative(power, x, y, 1, 0) == Approx(1.5 * p).epsilon(1e-6));
    CHECK(mellin_derivative(power, x, y, 0, 1) == Approx(-0.5 * p).epsilon(1e-6));
    CHECK(mellin_derivative(power, x, y, 2, 0) == Approx(2.25 * p).epsilon(1e-6));
    CHECK(mellin_derivative(power, x, y, 1, 1) == Approx(-0.75 * p).epsilon(1e-6));
    CHECK(mellin_derivative(power, x, y, 0, 2) == Approx(0.25 * p).epsilon(1e-6));
    CHECK(mellin_derivative(c, x, y, 0, 0) == 2.0);
    CHECK(std::abs(mellin_derivative(c, x, y, 1, 1)) <= 1e-12);
  }
  CHECK_THROWS_AS(mellin_derivative(c, 1.0, 1.0, 2, 1), UnsupportedOrderError);
  CHECK_THROWS_AS(mellin_derivative(c, 1.0, 1.0, 3, 0), UnsupportedOrderError);
  CHECK_THROWS_AS(mellin_derivative(c, 0.0, 1.0, 1, 0), DomainError);
}

TEST_CASE("mellin_bogel_derivative") {
  const TargetFunction prod = fn([](double x, double y) { return std::log(x) * std::log(y); });
  const TargetFunction sep = fn([](double x, double y) { return std::sin(x) + y * y; });
  const TargetFunction power = fn([](double x, double y) { return x * x * y; });
  for (auto [x, y] : {std::pair{0.5, 1.5}, std::pair{2.0, 2.5}}) {
    CHECK(mellin_bogel_derivative(prod, x, y) == Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(mellin_bogel_derivative(sep, x, y)) <= 1e-6);
    CHECK(mellin_bogel_derivative(power, x, y) == Approx(2.0 * x * x * y).epsilon(1e-6));
  }
}

TEST_CASE("delta_mixed") {
  const TargetFunction prod = fn([](double x, double y) { return std::log(x) * std::log(y); });
  const TargetFunction sep = fn([](double x, double y) { return std::exp(x) - std::cos(y); });
  CHECK(delta_mixed(prod, 1.0, 1.0, std::numbers::e, std::numbers::e) == Approx(1.0));
  CHECK(std::abs(delta_mixed(prod, 2.0, 3.0, 2.0, 0.5)) <= 1e-15);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(0.3, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double x = c(rng), y = c(rng), s = c(rng), t = c(rng);
    CHECK(std::abs(delta_mixed(sep, x, y, s, t)) <= 1e-12);
    const double d = delta_mixed(prod, x, y, s, t);
    CHECK(d == Approx((std::log(s) - std::log(x)) * (std::log(t) - std::log(y))).epsilon(1e-10));
    CHECK(delta_mixed(prod, s, t, x, y) == Approx(d).epsilon(1e-12));
  }
  CHECK_THROWS_AS(delta_mixed(prod, -1.0, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("moduli on a grid") {
  const ProbePlan plan{0.0, 1.0, 0.0, 1.0, 101};
  const TargetFunction logx = fn([](double x, double) { return std::log(x); });
  const TargetFunction prod = fn([](double x, double y) { return std::log(x) * std::log(y); });
  const TargetFunction sep = fn([](double x, double y) { return std::sin(3 * x) + y; });

  CHECK(log_modulus(logx, 0.1, 0.1, plan).value == Approx(0.1).epsilon(1e-9));
  CHECK(log_modulus(logx, 0.0, 0.3, plan).value == 0.0);
  CHECK(mixed_modulus_B(prod, 0.1, 0.1, plan).value == Approx(0.01).epsilon(1e-9));
  CHECK(mixed_modulus_B(sep, 0.2, 0.3, plan).value <= 1e-12);
  CHECK(mixed_modulus_B(prod, 0.0, 0.5, plan).value <= 1e-15);

  double prev = 0.0;
  for (double d : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0}) {
    const double v = log_modulus(prod, d, d, plan).value;
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (double d : {0.0, 0.02, 0.1, 0.5}) {
    const double v = mixed_modulus_B(prod, d, 0.5 * d, plan).value;
    CHECK(v >= prev);
    prev = v;
  }

  CHECK_THROWS_AS(log_modulus(logx, 0.1, 0.1, ProbePlan{0.0, 1.0, 0.0, 1.0, 0}), ConfigError);
  CHECK_THROWS_AS(log_modulus(logx, -0.1, 0.1, plan), DomainError);
  CHECK(ProbePlan::over(Rect{1.0, std::numbers::e, 1.0, 1.0}, 3).log_x1 == Approx(1.0));
}

TEST_CASE("voronovskaya_residual") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  const TargetFunction logsum = fn([](double x, double y) { return std::log(x) + std::log(y); });
  const TargetFunction c = fn([](double, double) { return 7.0; });
  const TargetFunction sq = fn([](double x, double y) {
    const double a = std::log(x), b = std::log(y);
    return a * a + b * b;
  });
  for (double w : {10.0, 20.0, 40.0}) {
    const SamplingConfig cfg{w, 1, 8};
    CHECK(std::abs(voronovskaya_residual(b22, logsum, cfg, std::numbers::e, std::numbers::e)) <= 1e-6);
    CHECK(std::abs(voronovskaya_residual(b22, c, cfg, 1.3, 0.8)) <= 1e-9);
    const double r = voronovskaya_residual(b22, sq, cfg, std::numbers::e, std::numbers::e);
    CHECK(r == Approx(2.0 / (3.0 * w)).epsilon(1e-4));
  }
  const double r10 = voronovskaya_residual(b22, sq, {10.0, 1, 8}, std::numbers::e, std::numbers::e);
  const double r20 = voronovskaya_residual(b22, sq, {20.0, 1, 8}, std::numbers::e, std::numbers::e);
  CHECK(r20 / r10 == Approx(0.5).epsilon(0.25));

  const UnivariateKernel shifted([](double t) { return std::max(0.0, 1.0 - std::abs(t - 0.25)); }, 1.25,
                                 "shifted-hat");
  CHECK_THROWS_AS(voronovskaya_residual(BivariateKernel{shifted, shifted}, c, {10.0, 1, 8}, 1.0, 1.0),
                  PreconditionError);
  const BivariateKernel box = kernel_from_id("mbspline:1");
  CHECK_THROWS_AS(voronovskaya_residual(box, c, {10.0, 1, 8}, 1.0, 1.0), PreconditionError);
}

TEST_CASE("bound formulas for the order-2 tensor kernel") {
  const KernelMoments m = hat_moments();
  CHECK(kappa_constant(m) == Approx(16.0));
  for (double w : {8.0, 10.0, 35.0, 40.0}) {
    CHECK(bound_thm33(m, w, 1.0 / w, 1.0 / w, 0.3) == Approx(4.0 * 0.3));
    CHECK(bound_thm33(m, w, 1.0 / w, 1.0 / w, 0.3) == Approx(bound_rmk34(m, 0.3)));
    const GbsConstants a = gbs_continuous_constants(m, w);
    CHECK(a.a1 == Approx(1.0 / w));
    CHECK(a.a2 == Approx(1.0 / w));
    CHECK(a.a3 == Approx(1.0 / (w * w)));
    CHECK(bound_thm41(m, w, 1.0 / w, 1.0 / w, 0.5) == Approx(4.0 * 0.5));
    CHECK(bound_thm43(1.0, m, w) == Approx(1.0 / (w * w)));
    CHECK(gbs_differentiable_constants(m, w).e1 == Approx(1.0 / (w * w)));
  }
  CHECK(gbs_differentiable_constants(m, 10.0).e1 == Approx(0.01));
  CHECK(bound_thm43(1.0, m, 10.0) == Approx(0.01));
  CHECK(bound_thm33(m, 10.0, 0.2, 0.2, 0.0) == 0.0);

  // Scaling in w: E1 ~ w^-2, E2 and E3 ~ w^-3, E4 ~ w^-4.
  const auto e10 = gbs_differentiable_constants(m, 10.0);
  const auto e20 = gbs_differentiable_constants(m, 20.0);
  CHECK(e10.e1 / e20.e1 == Approx(4.0));
  CHECK(e10.e2 / e20.e2 == Approx(8.0));
  CHECK(e10.e3 / e20.e3 == Approx(8.0));
  CHECK(e10.e4 / e20.e4 == Approx(16.0));
  CHECK(e10.e2 == Approx(6.5 / 6000.0));
  CHECK(bound_thm42(m, 10.0, 0.1, 0.1, 0.0, 0.0, 1.0) == Approx(0.03));

  KernelMoments m0;
  m0.set(0, 0, 1.0);
  m0.set(1, 0, 0.0);
  m0.set(0, 1, 0.0);
  m0.set(1, 1, 0.0);
  CHECK(bound_rmk34(m0, 1.0) == Approx(2.25));
  CHECK_THROWS_AS(gbs_differentiable_constants(m0, 10.0), ConfigError);

  CHECK_THROWS_AS(bound_thm43(0.0, m, 10.0), DomainError);
  CHECK_THROWS_AS(bound_thm43(-1.0, m, 10.0), DomainError);
  CHECK_THROWS_AS(bound_thm33(m, 0.0, 0.1, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(bound_thm33(m, 10.0, 0.0, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(bound_thm41(m, 10.0, 0.1, 0.1, -1.0), DomainError);
  CHECK(bound_from_string("thm42") == BoundName::thm42);
  CHECK_THROWS_AS(bound_from_string("thm44"), ConfigError);
}

TEST_CASE("computed moments match the closed-form table") {
  const KernelMoments m = KernelMoments::compute(kernel_from_id("mbspline:2"), 256);
  const KernelMoments ref = hat_moments();
  for (unsigned p1 = 0; p1 <= 2; ++p1) {
    for (unsigned p2 = 0; p2 <= 2; ++p2) CHECK(m(p1, p2) == Approx(ref(p1, p2)).epsilon(1e-12));
  }
}

TEST_CASE("verify_bound") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  const KernelMoments m = hat_moments();

  const CatalogFunction logsum = function_from_id("log-sum");
  BoundRequest req;
  req.name = BoundName::rmk34;
  req.x = 1.0;
  req.y = 1.0;
  req.probe = ProbePlan::over(logsum.function.domain, 41);
  const BoundReport r = verify_bound(req, m, b22, logsum.function, logsum.facts, {10.0, 1, 8});
  CHECK(r.measured == Approx(0.1).epsilon(1e-9));
  CHECK(r.theoretical == Approx(0.8));
  CHECK(r.pass());
  CHECK(r.constants.count("estimated_omega") == 0);

  const CatalogFunction sep = function_from_id("y2-cos-pix");
  req.name = BoundName::thm41;
  req.x = 2.0;
  req.y = 1.5;
  req.probe = ProbePlan::over(sep.function.domain, 41);
  const BoundReport s = verify_bound(req, m, b22, sep.function, sep.facts, {8.0, 1, 8});
  CHECK(s.measured <= 1e-10);
  CHECK(s.theoretical == 0.0);
  CHECK(s.pass());
  CHECK(s.rounding_slack == Approx(1e-12 * std::abs(sep.function(2.0, 1.5))));
  BoundReport over = s;
  over.measured = 2.0 * over.rounding_slack;
  CHECK_FALSE(over.pass());

  const CatalogFunction prod = function_from_id("log-product");
  req.name = BoundName::thm43;
  req.x = 1.5;
  req.y = 0.75;
  req.probe = ProbePlan::over(prod.function.domain, 41);
  const BoundReport t = verify_bound(req, m, b22, prod.function, prod.facts, {10.0, 1, 8});
  CHECK(t.measured == Approx(0.0025).epsilon(1e-8));
  CHECK(t.theoretical == Approx(0.01));
  CHECK(t.pass());

  const nlohmann::json j = t;
  CHECK(j["bound_name"] == "thm43");
  CHECK(j["verdict"] == "PASS");
  CHECK(j["point"].size() == 2);

  FunctionFacts none;
  CHECK_THROWS_AS(verify_bound(req, m, b22, prod.function, none, {10.0, 1, 8}), PreconditionError);

  req.name = BoundName::thm33;
  const BoundReport est = verify_bound(req, m, b22, prod.function, none, {10.0, 1, 8});
  CHECK(est.constants.count("estimated_omega") == 1);
  CHECK(est.pass());
}

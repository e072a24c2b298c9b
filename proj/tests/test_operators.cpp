#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "expsamp/errors.hpp"
#include "expsamp/operators.hpp"
#include "expsamp/quadrature.hpp"
#include "oracles.hpp"

using namespace expsamp;
using doctest::Approx;

namespace {

TargetFunction fn(std::function<double(double, double)> f) { return TargetFunction{std::move(f), {0.1, 4.0, 0.1, 4.0}}; }

const TargetFunction kOne = fn([](double, double) { return 1.0; });
const TargetFunction kLogX = fn([](double x, double) { return std::log(x); });
const TargetFunction kLogY = fn([](double, double y) { return std::log(y); });
const TargetFunction kSin = fn([](double x, double y) { return std::sin(x * x - y * y); });

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (unsigned n = 1; n <= 12; ++n) {
    const GaussLegendreRule r = gauss_legendre(n);
    for (unsigned deg = 0; deg < 2 * n; ++deg) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1.0);
      CHECK(q == Approx(exact).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ConfigError);
}

TEST_CASE("SamplingConfig validation") {
  CHECK_THROWS_AS((SamplingConfig{0.0, 1, 8}.validate()), DomainError);
  CHECK_THROWS_AS((SamplingConfig{-1.0, 1, 8}.validate()), DomainError);
  CHECK_THROWS_AS((SamplingConfig{1.0, -1, 8}.validate()), ConfigError);
  CHECK_THROWS_AS((SamplingConfig{1.0, 1, 0}.validate()), ConfigError);
}

TEST_CASE("cell_average") {
  const SamplingConfig cfg{10.0, 1, 8};
  const TargetFunction c = fn([](double, double) { return -3.5; });
  CHECK(cell_average(c, 4, -7, cfg) == Approx(-3.5).epsilon(1e-15));
  for (long k : {-12L, 0L, 3L, 25L}) {
    CHECK(cell_average(kLogX, k, 2, cfg) == Approx((k + 0.5) / cfg.w).epsilon(1e-14));
    const TargetFunction x = fn([](double xx, double) { return xx; });
    const double exact = cfg.w * (std::exp((k + 1.0) / cfg.w) - std::exp(k / cfg.w));
    CHECK(cell_average(x, k, 5, cfg) == Approx(exact).epsilon(1e-14));
  }
  const TargetFunction bad = fn([](double x, double) { return x > 1.5 ? std::nan("") : 0.0; });
  CHECK_THROWS_AS(cell_average(bad, 10, 0, cfg), DomainError);
}

TEST_CASE("cell_average against composite Simpson") {
  const SamplingConfig cfg{10.0, 1, 8};
  for (long k : {-20L, 3L, 6L}) {
    for (long j : {-9L, 5L}) {
      const double oracle_mean = oracle::simpson_mean(
          [](double u, double v) { return std::sin(std::exp(2 * u) - std::exp(2 * v)); }, k / cfg.w,
          (k + 1) / cfg.w, j / cfg.w, (j + 1) / cfg.w);
      CHECK(cell_average(kSin, k, j, cfg) == Approx(oracle_mean).epsilon(1e-10));
    }
  }
}

TEST_CASE("kantorovich_eval reproduces constants for every shipped kernel") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(0.05, 5.0);
  for (unsigned n = 1; n <= 3; ++n) {
    const BivariateKernel k = kernel_from_id("mbspline:" + std::to_string(n));
    for (double w : {1.0, 8.0, 10.0, 35.0, 40.0}) {
      for (int i = 0; i < 100; ++i) {
        const double x = coord(rng);
        const double y = coord(rng);
        CHECK(std::abs(kantorovich_eval(k, kOne, {w, 1, 8}, x, y) - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("kantorovich_eval log-linear shift identity") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(0.05, 5.0);
  for (double w : {1.0, 8.0, 10.0, 35.0, 40.0}) {
    for (int i = 0; i < 100; ++i) {
      const double x = coord(rng);
      const double y = coord(rng);
      const SamplingConfig cfg{w, 1, 8};
      CHECK(std::abs(kantorovich_eval(b22, kLogX, cfg, x, y) - (std::log(x) + 0.5 / w)) <= 1e-10);
      CHECK(std::abs(kantorovich_eval(b22, kLogY, cfg, x, y) - (std::log(y) + 0.5 / w)) <= 1e-10);
    }
  }
}

TEST_CASE("kantorovich_eval against the brute-force oracle") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  for (double w : {10.0, 20.0}) {
    for (auto [x, y] : {std::pair{0.6, 0.5}, std::pair{1.7, 2.2}}) {
      const double ref = oracle::kantorovich_hat(w, x, y, [w](long k, long j) {
        return oracle::simpson_mean(
            [](double u, double v) { return std::sin(std::exp(2 * u) - std::exp(2 * v)); }, k / w,
            (k + 1) / w, j / w, (j + 1) / w, 100);
      });
      CHECK(kantorovich_eval(b22, kSin, {w, 1, 8}, x, y) == Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("table1 preset sample point") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  const double err = std::abs(kSin(0.6, 0.5) - kantorovich_eval(b22, kSin, {10.0, 1, 8}, 0.6, 0.5));
  CHECK(err == Approx(0.0119).epsilon(1e-3 / 0.0119));
}

TEST_CASE("kantorovich_eval errors") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  CHECK_THROWS_AS(kantorovich_eval(b22, kOne, {10.0, 1, 8}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(kantorovich_eval(b22, kOne, {10.0, 1, 8}, 1.0, -1.0), DomainError);
  const UnivariateKernel gauss([](double t) { return std::exp(-t * t); }, kUnboundedSupport, "gauss");
  CHECK_THROWS_AS(kantorovich_eval(BivariateKernel{gauss, gauss}, kOne, {10.0, 1, 8}, 1.0, 1.0),
                  ConfigError);
}

TEST_CASE("enlarging the lattice margin is bitwise neutral") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(0.1, 3.0);
  for (unsigned n = 1; n <= 3; ++n) {
    const BivariateKernel k = kernel_from_id("mbspline:" + std::to_string(n));
    for (int i = 0; i < 20; ++i) {
      const double x = coord(rng);
      const double y = coord(rng);
      const double base = kantorovich_eval(k, kSin, {10.0, 0, 6}, x, y);
      CHECK(kantorovich_eval(k, kSin, {10.0, 1, 6}, x, y) == base);
      CHECK(kantorovich_eval(k, kSin, {10.0, 5, 6}, x, y) == base);
    }
  }
}

TEST_CASE("quadrature order convergence") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  for (unsigned q : {5u, 6u, 8u}) {
    for (auto [x, y] : {std::pair{0.2, 0.1}, std::pair{1.1, 0.9}, std::pair{1.9, 1.8}}) {
      const double a = kantorovich_eval(b22, kSin, {10.0, 1, q}, x, y);
      const double b = kantorovich_eval(b22, kSin, {10.0, 1, 2 * q}, x, y);
      CHECK(std::abs(a - b) < 1e-9);
    }
  }
}

TEST_CASE("error decays from w = 10 to w = 40 on the table probes") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  for (auto [x, y] : {std::pair{0.2, 0.1}, std::pair{0.6, 0.5}, std::pair{1.1, 0.9}, std::pair{1.9, 1.8}}) {
    const double e10 = std::abs(kSin(x, y) - kantorovich_eval(b22, kSin, {10.0, 1, 8}, x, y));
    const double e40 = std::abs(kSin(x, y) - kantorovich_eval(b22, kSin, {40.0, 1, 8}, x, y));
    CHECK(e40 < e10);
  }
}

TEST_CASE("gbs_eval closed forms") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  const TargetFunction separable =
      fn([](double x, double y) { return std::sin(3.0 * std::log(x)) + y * y - 2.0 * std::cos(y); });
  const TargetFunction logprod = fn([](double x, double y) { return std::log(x) * std::log(y); });
  const TargetFunction c = fn([](double, double) { return 4.25; });
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(0.1, 4.0);
  for (double w : {8.0, 10.0}) {
    const SamplingConfig cfg{w, 1, 8};
    for (int i = 0; i < 30; ++i) {
      const double x = coord(rng);
      const double y = coord(rng);
      CHECK(std::abs(gbs_eval(b22, separable, cfg, x, y) - separable(x, y)) <= 1e-10);
      CHECK(std::abs(gbs_eval(b22, logprod, cfg, x, y) - (std::log(x) * std::log(y) - 0.25 / (w * w))) <= 1e-9);
      CHECK(gbs_eval(b22, c, cfg, x, y) == Approx(4.25).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gbs_eval(b22, c, {8.0, 1, 8}, -1.0, 1.0), DomainError);
}

TEST_CASE("eval_grid") {
  const BivariateKernel b22 = kernel_from_id("mbspline:2");
  const SamplingConfig cfg{10.0, 1, 8};

  const GridSpec one{{0.7}, {1.3}};
  const Matrix m1 = eval_grid(b22, kSin, cfg, one, Variant::kantorovich);
  CHECK(m1.rows == 1);
  CHECK(m1.cols == 1);
  CHECK(m1(0, 0) == kantorovich_eval(b22, kSin, cfg, 0.7, 1.3));

  const GridSpec g = GridSpec::linspace(0.3, 2.0, 7, 0.5, 1.5, 4);
  const Matrix ones = eval_grid(b22, kOne, cfg, g, Variant::kantorovich);
  for (double v : ones.data) CHECK(std::abs(v - 1.0) <= 1e-12);

  const GridSpec two{{0.4, 1.9}, {0.8, 2.5}};
  const Matrix logs = eval_grid(b22, kLogX, cfg, two, Variant::kantorovich);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(std::abs(logs(r, c) - (std::log(two.x_points[c]) + 0.05)) <= 1e-10);
    }
  }

  const Matrix gbs = eval_grid(b22, kSin, cfg, g, Variant::gbs);
  for (std::size_t r = 0; r < g.y_points.size(); ++r) {
    for (std::size_t c = 0; c < g.x_points.size(); ++c) {
      CHECK(gbs(r, c) == gbs_eval(b22, kSin, cfg, g.x_points[c], g.y_points[r]));
    }
  }

  CHECK_THROWS_AS(eval_grid(b22, kOne, cfg, GridSpec{{1.0, 0.5}, {1.0}}, Variant::gbs), ConfigError);
  CHECK_THROWS_AS(eval_grid(b22, kOne, cfg, GridSpec{{0.0, 0.5}, {1.0}}, Variant::gbs), ConfigError);
  CHECK_THROWS_AS(eval_grid(b22, kOne, cfg, GridSpec{{}, {1.0}}, Variant::gbs), ConfigError);
}

TEST_CASE("error_field") {
  const GridSpec g = GridSpec::linspace(0.5, 1.5, 3, 0.5, 1.5, 2);
  const Matrix exact = sample_grid(kSin, g);
  const ErrorField zero = error_field(kSin, exact, g);
  CHECK(zero.sup_error == 0.0);
  for (double v : zero.abs_errors.data) CHECK(v == 0.0);

  Matrix shifted = exact;
  for (double& v : shifted.data) v += 0.5;
  const ErrorField half = error_field(kSin, shifted, g);
  CHECK(half.sup_error == Approx(0.5));
  for (double v : half.abs_errors.data) CHECK(v == Approx(0.5));

  CHECK_THROWS_AS(error_field(kSin, Matrix(3, 2), g), ConfigError);
}

TEST_CASE("grid writers") {
  const GridSpec g{{0.5, 1.0}, {2.0}};
  Matrix m(1, 2);
  m(0, 0) = 0.25;
  m(0, 1) = -1.0;
  std::ostringstream csv;
  write_grid_csv(csv, g, m);
  CHECK(csv.str() == "y\\x,0.5,1\n2,0.25,-1\n");

  std::ostringstream err;
  write_error_csv(err, g, ErrorField{m, 1.0});
  CHECK(err.str() == "x,y,abs_error\n0.5,2,0.25\n1,2,-1\n");

  const nlohmann::json j = grid_to_json(g, m);
  CHECK(j["values"][0][1] == -1.0);
  CHECK(j["x"].size() == 2);
  CHECK(variant_from_string("gbs") == Variant::gbs);
  CHECK_THROWS_AS(variant_from_string("boolean"), ConfigError);
}

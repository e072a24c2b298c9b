#include "expsamp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "expsamp/errors.hpp"
#include "expsamp/quadrature.hpp"

namespace expsamp {

namespace {

void check_point(double x, double y, const char* who) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw DomainError(fmt::format("{}: ({}, {}) is outside the positive quadrant", who, x, y));
  }
}

// Lattice index range covering |k - center| <= radius + margin.
std::pair<long, long> lattice_range(double center, double radius, int margin) {
  return {static_cast<long>(std::floor(center - radius)) - margin,
          static_cast<long>(std::ceil(center + radius)) + margin};
}

template <typename RowFn>
void for_each_row_parallel(std::size_t rows, RowFn&& fn) {
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(rows, 1));
  if (workers <= 1) {
    for (std::size_t r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::future<void>> tasks;
  tasks.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    tasks.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t r = t; r < rows; r += workers) fn(r);
    }));
  }
  for (auto& task : tasks) task.get();
}

}  // namespace

void SamplingConfig::validate() const {
  if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("sampling scale w must be positive");
  if (lattice_margin < 0) throw ConfigError("lattice_margin must be nonnegative");
  if (quadrature_order == 0) throw ConfigError("quadrature_order must be >= 1");
}

GridSpec GridSpec::linspace(double x0, double x1, std::size_t nx, double y0, double y1,
                            std::size_t ny) {
  auto axis = [](double a, double b, std::size_t n) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return pts;
  };
  return GridSpec{axis(x0, x1, nx), axis(y0, y1, ny)};
}

void GridSpec::validate() const {
  auto check = [](const std::vector<double>& pts, const char* name) {
    if (pts.empty()) throw ConfigError(fmt::format("grid: no {} points", name));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!(pts[i] > 0.0)) {
        throw ConfigError(fmt::format("grid: {} point {} is not positive", name, pts[i]));
      }
      if (i > 0 && !(pts[i] > pts[i - 1])) {
        throw ConfigError(fmt::format("grid: {} points are not strictly increasing", name));
      }
    }
  };
  check(x_points, "x");
  check(y_points, "y");
}

std::string to_string(Variant v) { return v == Variant::gbs ? "gbs" : "kantorovich"; }

Variant variant_from_string(const std::string& s) {
  if (s == "kantorovich") return Variant::kantorovich;
  if (s == "gbs") return Variant::gbs;
  throw ConfigError("unknown operator variant '" + s + "'");
}

double cell_average(const TargetFunction& f, long k, long j, const SamplingConfig& cfg) {
  cfg.validate();
  const GaussLegendreRule& rule = gauss_legendre_cached(cfg.quadrature_order);
  const double w = cfg.w;
  const std::size_t n = rule.size();

  // Nodes mapped to [k/w, (k+1)/w]; weights halved so each axis sums to 1.
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t p = 0; p < n; ++p) {
    xs[p] = std::exp((static_cast<double>(k) + 0.5 + 0.5 * rule.nodes[p]) / w);
    ys[p] = std::exp((static_cast<double>(j) + 0.5 + 0.5 * rule.nodes[p]) / w);
  }
  double mean = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double row = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double value = f(xs[p], ys[q]);
      if (!std::isfinite(value)) {
        throw DomainError(fmt::format("target function is not finite at ({}, {}) in cell ({}, {})",
                                      xs[p], ys[q], k, j));
      }
      row += 0.5 * rule.weights[q] * value;
    }
    mean += 0.5 * rule.weights[p] * row;
  }
  return mean;
}

double kantorovich_eval(const BivariateKernel& kernel, const TargetFunction& f,
                        const SamplingConfig& cfg, double x, double y) {
  check_point(x, y, "kantorovich_eval");
  cfg.validate();
  if (!kernel.factor_x.compact() || !kernel.factor_y.compact()) {
    throw ConfigError("kantorovich_eval: kernels with unbounded support have no truncation policy");
  }
  const double a = cfg.w * std::log(x);
  const double b = cfg.w * std::log(y);
  const auto [k_lo, k_hi] = lattice_range(a, kernel.factor_x.log_support_radius(), cfg.lattice_margin);
  const auto [j_lo, j_hi] = lattice_range(b, kernel.factor_y.log_support_radius(), cfg.lattice_margin);

  double sum = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double cx = kernel.factor_x.at_log(a - static_cast<double>(k));
    if (cx == 0.0) continue;
    for (long j = j_lo; j <= j_hi; ++j) {
      const double cy = kernel.factor_y.at_log(b - static_cast<double>(j));
      if (cy == 0.0) continue;
      sum += cx * cy * cell_average(f, k, j, cfg);
    }
  }
  return sum;
}

double gbs_eval(const BivariateKernel& kernel, const TargetFunction& f, const SamplingConfig& cfg,
                double x, double y) {
  check_point(x, y, "gbs_eval");
  const TargetFunction composite{
      [&f, x, y](double s, double t) { return f(x, t) + f(s, y) - f(s, t); }, f.domain};
  return kantorovich_eval(kernel, composite, cfg, x, y);
}

double operator_eval(Variant variant, const BivariateKernel& kernel, const TargetFunction& f,
                     const SamplingConfig& cfg, double x, double y) {
  return variant == Variant::gbs ? gbs_eval(kernel, f, cfg, x, y)
                                 : kantorovich_eval(kernel, f, cfg, x, y);
}

Matrix eval_grid(const BivariateKernel& kernel, const TargetFunction& f, const SamplingConfig& cfg,
                 const GridSpec& grid, Variant variant) {
  grid.validate();
  cfg.validate();
  Matrix out(grid.y_points.size(), grid.x_points.size());
  for_each_row_parallel(out.rows, [&](std::size_t r) {
    for (std::size_t c = 0; c < out.cols; ++c) {
      out(r, c) = operator_eval(variant, kernel, f, cfg, grid.x_points[c], grid.y_points[r]);
    }
  });
  return out;
}

Matrix sample_grid(const TargetFunction& f, const GridSpec& grid) {
  grid.validate();
  Matrix out(grid.y_points.size(), grid.x_points.size());
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t c = 0; c < out.cols; ++c) out(r, c) = f(grid.x_points[c], grid.y_points[r]);
  }
  return out;
}

ErrorField error_field(const TargetFunction& f, const Matrix& approx, const GridSpec& grid) {
  if (approx.rows != grid.y_points.size() || approx.cols != grid.x_points.size()) {
    throw ConfigError(fmt::format("error_field: matrix is {}x{} but grid is {}x{}", approx.rows,
                                  approx.cols, grid.y_points.size(), grid.x_points.size()));
  }
  ErrorField field{Matrix(approx.rows, approx.cols), 0.0};
  for (std::size_t r = 0; r < approx.rows; ++r) {
    for (std::size_t c = 0; c < approx.cols; ++c) {
      const double e = std::abs(f(grid.x_points[c], grid.y_points[r]) - approx(r, c));
      field.abs_errors(r, c) = e;
      field.sup_error = std::max(field.sup_error, e);
    }
  }
  return field;
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_grid_csv(std::ostream& os, const GridSpec& grid, const Matrix& values) {
  os << "y\\x";
  for (double x : grid.x_points) os << ',' << format_number(x);
  os << '\n';
  for (std::size_t r = 0; r < values.rows; ++r) {
    os << format_number(grid.y_points[r]);
    for (std::size_t c = 0; c < values.cols; ++c) os << ',' << format_number(values(r, c));
    os << '\n';
  }
}

void write_error_csv(std::ostream& os, const GridSpec& grid, const ErrorField& errors) {
  os << "x,y,abs_error\n";
  for (std::size_t r = 0; r < errors.abs_errors.rows; ++r) {
    for (std::size_t c = 0; c < errors.abs_errors.cols; ++c) {
      os << format_number(grid.x_points[c]) << ',' << format_number(grid.y_points[r]) << ','
         << format_number(errors.abs_errors(r, c)) << '\n';
    }
  }
}

nlohmann::json grid_to_json(const GridSpec& grid, const Matrix& values) {
  auto rows = nlohmann::json::array();
  for (std::size_t r = 0; r < values.rows; ++r) {
    rows.push_back(std::vector<double>(values.data.begin() + static_cast<long>(r * values.cols),
                                       values.data.begin() + static_cast<long>((r + 1) * values.cols)));
  }
  return nlohmann::json{{"x", grid.x_points}, {"y", grid.y_points}, {"values", rows}};
}

}  // namespace expsamp

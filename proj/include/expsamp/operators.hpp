#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "expsamp/kernels.hpp"

namespace expsamp {

struct SamplingConfig {
  double w = 1.0;
  int lattice_margin = 1;
  unsigned quadrature_order = 8;

  /// DomainError unless w > 0; ConfigError for a negative margin or zero order.
  void validate() const;
};

/// Axis-aligned rectangle inside the open positive quadrant.
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
};

/// f(x, y) on the positive quadrant. Cells near the edge of `domain` read f
/// slightly outside it, so the evaluator must be finite on a neighbourhood.
struct TargetFunction {
  std::function<double(double, double)> evaluator;
  Rect domain{};

  double operator()(double x, double y) const { return evaluator(x, y); }
};

struct GridSpec {
  std::vector<double> x_points;
  std::vector<double> y_points;

  /// n points from a to b inclusive (n == 1 gives {a}).
  static GridSpec linspace(double x0, double x1, std::size_t nx, double y0, double y1,
                           std::size_t ny);
  /// ConfigError unless both axes are nonempty and strictly increasing over positive values.
  void validate() const;
};

/// Row-major matrix: one row per y point, one column per x point.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

enum class Variant { kantorovich, gbs };

std::string to_string(Variant v);
/// "kantorovich" or "gbs"; ConfigError otherwise.
Variant variant_from_string(const std::string& s);

/// Mean of f(e^u, e^v) over [k/w, (k+1)/w] x [j/w, (j+1)/w] by tensor
/// Gauss-Legendre. A non-finite value of f inside the cell raises DomainError.
double cell_average(const TargetFunction& f, long k, long j, const SamplingConfig& cfg);

/// Bivariate Kantorovich exponential sampling series at (x, y):
///
///   sum_k sum_j chi(e^{-k} x^w, e^{-j} y^w) * w^2 * int_cell f(e^u, e^v) du dv
///
/// Indices are limited to |k - w log x| <= R + margin (likewise for j), which
/// is exact for compactly supported kernels. k is the outer loop, j the inner,
/// both ascending; cells where the kernel weight is zero are skipped.
double kantorovich_eval(const BivariateKernel& kernel, const TargetFunction& f,
                        const SamplingConfig& cfg, double x, double y);

/// GBS (Boolean sum) variant: the series applied to
///   g(s, t) = f(x, t) + f(s, y) - f(s, t).
double gbs_eval(const BivariateKernel& kernel, const TargetFunction& f, const SamplingConfig& cfg,
                double x, double y);

double operator_eval(Variant variant, const BivariateKernel& kernel, const TargetFunction& f,
                     const SamplingConfig& cfg, double x, double y);

/// Operator values over a grid (row per y, column per x). Rows are evaluated in
/// parallel; each entry is bitwise identical to the pointwise call.
Matrix eval_grid(const BivariateKernel& kernel, const TargetFunction& f, const SamplingConfig& cfg,
                 const GridSpec& grid, Variant variant);

/// f sampled on the grid with the same layout as eval_grid.
Matrix sample_grid(const TargetFunction& f, const GridSpec& grid);

struct ErrorField {
  Matrix abs_errors;
  double sup_error = 0.0;
};

/// |f(x_i, y_j) - approx(j, i)| and its maximum. ConfigError on shape mismatch.
ErrorField error_field(const TargetFunction& f, const Matrix& approx, const GridSpec& grid);

/// Header row "y\x,x_0,...", then one row per y starting with the y value.
void write_grid_csv(std::ostream& os, const GridSpec& grid, const Matrix& values);
/// Columns x, y, abs_error in row-major order.
void write_error_csv(std::ostream& os, const GridSpec& grid, const ErrorField& errors);

nlohmann::json grid_to_json(const GridSpec& grid, const Matrix& values);

/// Shortest round-trip decimal representation used by every data writer.
std::string format_number(double v);

}  // namespace expsamp

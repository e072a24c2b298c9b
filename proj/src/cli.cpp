#include "expsamp/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "expsamp/analysis.hpp"
#include "expsamp/catalog.hpp"
#include "expsamp/errors.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/operators.hpp"
#include "expsamp/presets.hpp"

namespace expsamp::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string kernel_id = "mbspline:2";
  std::string function_id;
  std::vector<double> w_list;
  std::string grid;    // "WxH"
  std::string domain;  // "x0:x1:y0:y1"
  unsigned quad_order = 8;
  int margin = 1;
  std::string out;
  std::string format;
  std::string preset;
  std::string variant = "kantorovich";
  std::string errors_out;
  std::vector<std::string> points;  // "x:y"
  std::string bound;
  std::string delta;  // "d1:d2"
  double lipschitz = 0.0;
  unsigned probe_resolution = 256;
  std::size_t probe_points = 41;
  std::vector<double> gammas{0.5, 1.0, 2.0, 4.0};
  double tol = 1e-12;
};

std::vector<double> split_reals(const std::string& text, char sep, std::size_t expected,
                                const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError(fmt::format("cannot parse {} '{}'", what, text));
    values.push_back(v);
  }
  if (values.size() != expected) throw ConfigError(fmt::format("malformed {} '{}'", what, text));
  return values;
}

std::pair<std::size_t, std::size_t> parse_grid_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("grid must be WxH, got '" + text + "'");
  try {
    const long w = std::stol(text.substr(0, x));
    const long h = std::stol(text.substr(x + 1));
    if (w <= 0 || h <= 0) throw ConfigError("grid dimensions must be positive");
    return {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
  } catch (const std::logic_error&) {
    throw ConfigError("grid must be WxH, got '" + text + "'");
  }
}

Rect parse_domain(const std::string& text) {
  const auto v = split_reals(text, ':', 4, "domain");
  const Rect r{v[0], v[1], v[2], v[3]};
  if (!(r.x0 > 0.0) || !(r.y0 > 0.0) || !(r.x1 >= r.x0) || !(r.y1 >= r.y0)) {
    throw ConfigError("domain must lie in the positive quadrant with x0 <= x1, y0 <= y1");
  }
  return r;
}

SamplingConfig sampling(const RunConfig& rc, double w) {
  SamplingConfig cfg{w, rc.margin, rc.quad_order};
  cfg.validate();
  return cfg;
}

void require_w(const std::vector<double>& ws) {
  if (ws.empty()) throw ConfigError("at least one --w value is required");
  for (double w : ws) {
    if (!(w > 0.0)) throw ConfigError("--w values must be positive");
  }
}

std::string meta_line(const RunConfig& rc, const std::string& extra) {
  std::string line = fmt::format("# command={} kernel={} quad-order={} margin={}", rc.command,
                                 rc.kernel_id, rc.quad_order, rc.margin);
  if (!extra.empty()) line += " " + extra;
  return line + "\n";
}

std::string join_w(const std::vector<double>& ws) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? "," : "") + format_number(ws[i]);
  return s;
}

// ---------------------------------------------------------------------------

int cmd_tables(const RunConfig& rc, std::ostream& out) {
  TablePreset preset;
  if (!rc.preset.empty()) {
    preset = table_preset(rc.preset);
  } else if (rc.function_id == "sin-x2-y2" || rc.function_id.empty()) {
    preset = table_preset("table1");
  } else if (rc.function_id == "y2-cos-pix") {
    preset = table_preset("table2");
  } else {
    // Any other catalog function runs on the first table's probes, without references.
    preset = table_preset("table1");
    preset.name = "custom";
    preset.function_id = rc.function_id;
    for (auto& row : preset.rows) row.reference.clear();
  }
  if (!rc.preset.empty() && !rc.function_id.empty() && rc.function_id != preset.function_id) {
    throw ConfigError("--function conflicts with --preset " + rc.preset);
  }
  std::vector<double> ws = rc.w_list.empty() ? preset.w_values : rc.w_list;
  require_w(ws);

  const CatalogFunction cf = function_from_id(preset.function_id);
  const BivariateKernel kernel = kernel_from_id(rc.kernel_id);

  struct Cell {
    double w, approx, error;
    std::optional<double> reference;
  };
  bool all_within = true;
  std::vector<std::vector<Cell>> cells;
  for (const auto& row : preset.rows) {
    std::vector<Cell> r;
    for (double w : ws) {
      const double approx = kantorovich_eval(kernel, cf.function, sampling(rc, w), row.x, row.y);
      const double error = std::abs(cf.function(row.x, row.y) - approx);
      std::optional<double> ref;
      const auto it = std::find(preset.w_values.begin(), preset.w_values.end(), w);
      if (it != preset.w_values.end() && !row.reference.empty()) {
        ref = row.reference[static_cast<std::size_t>(it - preset.w_values.begin())];
        if (!(std::abs(error - *ref) <= preset.tolerance)) all_within = false;
      }
      r.push_back({w, approx, error, ref});
    }
    cells.push_back(std::move(r));
  }

  const std::string format = rc.format.empty() ? "text" : rc.format;
  if (format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < preset.rows.size(); ++i) {
      json results = json::array();
      for (const auto& c : cells[i]) {
        json e{{"w", c.w}, {"approx", c.approx}, {"abs_error", c.error}};
        if (c.reference) {
          e["reference"] = *c.reference;
          e["deviation"] = std::abs(c.error - *c.reference);
          e["within_tolerance"] = std::abs(c.error - *c.reference) <= preset.tolerance;
        }
        results.push_back(e);
      }
      const auto& row = preset.rows[i];
      rows.push_back({{"x", row.x}, {"y", row.y}, {"f", cf.function(row.x, row.y)}, {"results", results}});
    }
    json doc{{"table", preset.name},   {"function", cf.id},         {"kernel", rc.kernel_id},
             {"quadrature_order", rc.quad_order}, {"tolerance", preset.tolerance}, {"rows", rows}};
    if (!preset.note.empty()) doc["note"] = preset.note;
    out << doc.dump(2) << '\n';
  } else if (format == "csv") {
    out << meta_line(rc, fmt::format("table={} function={}", preset.name, cf.id));
    out << "x,y,w,abs_error,reference,deviation\n";
    for (std::size_t i = 0; i < preset.rows.size(); ++i) {
      for (const auto& c : cells[i]) {
        out << format_number(preset.rows[i].x) << ',' << format_number(preset.rows[i].y) << ','
            << format_number(c.w) << ',' << format_number(c.error) << ','
            << (c.reference ? format_number(*c.reference) : "") << ','
            << (c.reference ? format_number(std::abs(c.error - *c.reference)) : "") << '\n';
      }
    }
  } else if (format == "text") {
    out << meta_line(rc, fmt::format("table={} function=\"{}\" tolerance={}", preset.name,
                                     cf.description, format_number(preset.tolerance)));
    if (!preset.note.empty()) out << "# " << preset.note << '\n';
    out << fmt::format("{:>6} {:>6}", "x", "y");
    for (double w : ws) {
      out << fmt::format(" {:>12} {:>9} {:>9}", fmt::format("|f-I_{}f|", format_number(w)), "ref", "dev");
    }
    out << '\n';
    for (std::size_t i = 0; i < preset.rows.size(); ++i) {
      out << fmt::format("{:>6} {:>6}", format_number(preset.rows[i].x), format_number(preset.rows[i].y));
      for (const auto& c : cells[i]) {
        out << fmt::format(" {:>12.4f}", c.error);
        if (c.reference) {
          const double dev = std::abs(c.error - *c.reference);
          out << fmt::format(" {:>9.4f} {:>9.4f}", *c.reference, dev);
          if (dev > preset.tolerance) out << " DISCREPANCY";
        } else {
          out << fmt::format(" {:>9} {:>9}", "-", "-");
        }
      }
      out << '\n';
    }
  } else {
    throw ConfigError("tables supports --format text, csv or json");
  }
  return all_within ? kExitPass : kExitFail;
}

int cmd_grid(const RunConfig& rc, std::ostream& out) {
  std::string function_id = rc.function_id;
  std::vector<double> ws = rc.w_list;
  Rect domain{};
  std::size_t nx = 80;
  std::size_t ny = 80;
  if (!rc.preset.empty()) {
    const GridPreset p = grid_preset(rc.preset);
    if (function_id.empty()) function_id = p.function_id;
    if (ws.empty()) ws = p.w_values;
    domain = p.domain;
    nx = p.nx;
    ny = p.ny;
  }
  if (function_id.empty()) throw ConfigError("grid needs --function or --preset");
  const CatalogFunction cf = function_from_id(function_id);
  if (rc.preset.empty()) domain = cf.function.domain;
  if (!rc.domain.empty()) domain = parse_domain(rc.domain);
  if (!rc.grid.empty()) std::tie(nx, ny) = parse_grid_size(rc.grid);
  if (ws.empty()) ws = {10.0};
  require_w(ws);

  const BivariateKernel kernel = kernel_from_id(rc.kernel_id);
  const Variant variant = variant_from_string(rc.variant);
  const GridSpec grid = GridSpec::linspace(domain.x0, domain.x1, nx, domain.y0, domain.y1, ny);
  grid.validate();
  const Matrix exact = sample_grid(cf.function, grid);

  std::vector<Matrix> approx;
  std::vector<ErrorField> errors;
  for (double w : ws) {
    approx.push_back(eval_grid(kernel, cf.function, sampling(rc, w), grid, variant));
    errors.push_back(error_field(cf.function, approx.back(), grid));
  }

  const std::string format = rc.format.empty() ? "csv" : rc.format;
  if (format == "json") {
    json approximations = json::array();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      approximations.push_back({{"w", ws[i]},
                                {"variant", to_string(variant)},
                                {"values", grid_to_json(grid, approx[i])["values"]},
                                {"sup_error", errors[i].sup_error}});
    }
    json doc = grid_to_json(grid, exact);
    doc["f"] = doc["values"];
    doc.erase("values");
    doc["function"] = cf.id;
    doc["kernel"] = rc.kernel_id;
    doc["quadrature_order"] = rc.quad_order;
    doc["approximations"] = approximations;
    out << doc.dump() << '\n';
  } else if (format == "csv") {
    out << meta_line(rc, fmt::format("function={} variant={} w={}", cf.id, to_string(variant), join_w(ws)));
    out << "# surface f\n";
    write_grid_csv(out, grid, exact);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      out << fmt::format("# surface {} w={} sup_error={}\n", to_string(variant), format_number(ws[i]),
                         format_number(errors[i].sup_error));
      write_grid_csv(out, grid, approx[i]);
    }
  } else {
    throw ConfigError("grid supports --format csv or json");
  }

  if (!rc.errors_out.empty()) {
    std::ofstream eo(rc.errors_out, std::ios::binary);
    if (!eo) throw ConfigError("cannot open " + rc.errors_out);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      eo << fmt::format("# w={} variant={}\n", format_number(ws[i]), to_string(variant));
      write_error_csv(eo, grid, errors[i]);
    }
  }
  return kExitPass;
}

int cmd_moments(const RunConfig& rc, std::ostream& out, bool summary_only) {
  const BivariateKernel kernel = kernel_from_id(rc.kernel_id);
  const MomentReport report = check_admissibility(kernel, rc.probe_resolution, rc.gammas, rc.tol);

  double first_moment = 0.0;
  for (const auto& table : report.algebraic) {
    if (table.p1 + table.p2 != 1) continue;
    for (const auto& s : table.samples) first_moment = std::max(first_moment, std::abs(s.value));
  }

  json doc{{"kernel", rc.kernel_id},
           {"probe_resolution", rc.probe_resolution},
           {"tolerance", rc.tol},
           {"K1", report.k1_pass ? "PASS" : "FAIL"},
           {"K2", report.k2_pass ? "PASS" : "FAIL"},
           {"k1_max_deviation", report.k1_max_deviation},
           {"max_abs_first_moment", first_moment}};
  if (summary_only) {
    doc["absolute_sup"] = json(report)["absolute_sup"];
  } else {
    const KernelMoments km = KernelMoments::compute(kernel, rc.probe_resolution);
    json full = json::array();
    for (unsigned p1 = 0; p1 <= 2; ++p1) {
      for (unsigned p2 = 0; p2 <= 2; ++p2) full.push_back({{"p", {p1, p2}}, {"value", km(p1, p2)}});
    }
    doc["report"] = report;
    doc["absolute_moments_to_2_2"] = full;
    doc["kappa"] = kappa_constant(km);
  }
  out << doc.dump(2) << '\n';
  return report.k1_pass && report.k2_pass ? kExitPass : kExitFail;
}

std::vector<std::pair<double, double>> parse_points(const std::vector<std::string>& points) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : points) {
    const auto v = split_reals(p, ':', 2, "point");
    if (!(v[0] > 0.0) || !(v[1] > 0.0)) throw ConfigError("points must be in the positive quadrant");
    pts.emplace_back(v[0], v[1]);
  }
  return pts;
}

int cmd_bounds(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.bound.empty()) throw ConfigError("bounds needs --bound");
  if (rc.function_id.empty()) throw ConfigError("bounds needs --function");
  const BoundName name = bound_from_string(rc.bound);
  CatalogFunction cf = function_from_id(rc.function_id);
  if (rc.lipschitz > 0.0) cf.facts.lipschitz_k = rc.lipschitz;
  const BivariateKernel kernel = kernel_from_id(rc.kernel_id);
  const KernelMoments moments = KernelMoments::compute(kernel, rc.probe_resolution);
  std::vector<double> ws = rc.w_list.empty() ? std::vector<double>{10.0, 40.0} : rc.w_list;
  require_w(ws);

  auto pts = parse_points(rc.points);
  if (pts.empty()) {
    // 5 x 5 probe points spread over the function's domain.
    const GridSpec g = GridSpec::linspace(cf.function.domain.x0, cf.function.domain.x1, 5,
                                          cf.function.domain.y0, cf.function.domain.y1, 5);
    for (double y : g.y_points) {
      for (double x : g.x_points) pts.emplace_back(x, y);
    }
  }
  BoundRequest req;
  req.name = name;
  req.probe = ProbePlan::over(cf.function.domain, rc.probe_points);
  req.moment_resolution = rc.probe_resolution;
  if (!rc.delta.empty()) {
    const auto d = split_reals(rc.delta, ':', 2, "delta");
    req.delta1 = d[0];
    req.delta2 = d[1];
  }

  json reports = json::array();
  int failures = 0;
  for (double w : ws) {
    for (const auto& [x, y] : pts) {
      req.x = x;
      req.y = y;
      const BoundReport r = verify_bound(req, moments, kernel, cf.function, cf.facts, sampling(rc, w));
      json j = r;
      if (!r.pass()) {
        ++failures;
        err << "FAIL " << j.dump() << '\n';
      }
      reports.push_back(std::move(j));
    }
  }
  out << json{{"bound", rc.bound}, {"function", cf.id}, {"kernel", rc.kernel_id},
              {"failures", failures}, {"reports", reports}}
             .dump(2)
      << '\n';
  return failures == 0 ? kExitPass : kExitFail;
}

int cmd_voronovskaya(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.function_id.empty()) throw ConfigError("voronovskaya needs --function");
  const CatalogFunction cf = function_from_id(rc.function_id);
  const BivariateKernel kernel = kernel_from_id(rc.kernel_id);
  std::vector<double> ws = rc.w_list.empty() ? std::vector<double>{10.0, 20.0, 40.0, 80.0} : rc.w_list;
  require_w(ws);
  std::sort(ws.begin(), ws.end());
  auto pts = parse_points(rc.points);
  if (pts.empty()) pts.emplace_back(std::numbers::e, std::numbers::e);

  constexpr double kNoise = 1e-9;
  json points = json::array();
  bool pass = true;
  for (const auto& [x, y] : pts) {
    json residuals = json::array();
    double previous = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (double w : ws) {
      const double r = voronovskaya_residual(kernel, cf.function, sampling(rc, w), x, y);
      if (std::abs(r) > previous && std::abs(r) > kNoise) decreasing = false;
      previous = std::abs(r);
      residuals.push_back({{"w", w}, {"residual", r}});
    }
    if (!decreasing) {
      pass = false;
      err << fmt::format("FAIL residuals at ({}, {}) do not decrease with w\n", x, y);
    }
    points.push_back({{"point", {x, y}}, {"residuals", residuals}, {"verdict", decreasing ? "PASS" : "FAIL"}});
  }
  out << json{{"function", cf.id}, {"kernel", rc.kernel_id}, {"points", points}}.dump(2) << '\n';
  return pass ? kExitPass : kExitFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Bivariate Kantorovich exponential sampling: tables, grids, kernel checks, bounds",
               args.empty() ? "expsamp" : args.front()};
  app.set_config("--config", "", "Flat key=value file mirroring the long flags");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--kernel", rc.kernel_id, "Kernel id, e.g. mbspline:2");
  app.add_option("--function", rc.function_id, "Catalog function id");
  app.add_option("--w", rc.w_list, "Scale parameter (repeatable)");
  app.add_option("--grid", rc.grid, "Grid size WxH");
  app.add_option("--domain", rc.domain, "x0:x1:y0:y1");
  app.add_option("--quad-order", rc.quad_order, "Gauss-Legendre points per axis per cell");
  app.add_option("--margin", rc.margin, "Guard cells beyond the kernel support");
  app.add_option("--out", rc.out, "Output path (default stdout)");
  app.add_option("--format", rc.format, "csv, json (tables also accept text)")
      ->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--preset", rc.preset, "table1, table2, fig1 or fig2")
      ->check(CLI::IsMember({"table1", "table2", "fig1", "fig2"}));
  app.add_option("--variant", rc.variant, "kantorovich or gbs")
      ->check(CLI::IsMember({"kantorovich", "gbs"}));
  app.add_option("--errors-out", rc.errors_out, "Also write x,y,abs_error CSV here (grid)");
  app.add_option("--point", rc.points, "Probe point x:y (repeatable)");
  app.add_option("--bound", rc.bound, "thm33, rmk34, thm41, thm42 or thm43");
  app.add_option("--delta", rc.delta, "d1:d2 log-scale radii (default 1/w)");
  app.add_option("--lipschitz", rc.lipschitz, "Lipschitz constant K for thm43");
  app.add_option("--probe-resolution", rc.probe_resolution, "Moment probe grid points per axis");
  app.add_option("--probe-points", rc.probe_points, "Modulus probe grid points per axis");
  app.add_option("--gamma", rc.gammas, "K2 tail radii (repeatable)");
  app.add_option("--tol", rc.tol, "K1/K2 tolerance");

  const std::array<std::pair<const char*, const char*>, 6> commands{{
      {"tables", "Pointwise errors at table probe points"},
      {"grid", "Operator surface and error field on a grid"},
      {"moments", "Kernel moments with the K1/K2 report"},
      {"bounds", "Measured error against a theoretical estimate"},
      {"voronovskaya", "Residual of the asymptotic formula over w"},
      {"check-kernel", "K1/K2 admissibility summary"},
  }};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&rc, name = name] { rc.command = name; });
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("expsamp");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ostringstream buffer;
  int status = kExitPass;
  try {
    if (rc.command == "tables") status = cmd_tables(rc, buffer);
    else if (rc.command == "grid") status = cmd_grid(rc, buffer);
    else if (rc.command == "moments") status = cmd_moments(rc, buffer, false);
    else if (rc.command == "check-kernel") status = cmd_moments(rc, buffer, true);
    else if (rc.command == "bounds") status = cmd_bounds(rc, buffer, err);
    else if (rc.command == "voronovskaya") status = cmd_voronovskaya(rc, buffer, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedOrderError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (rc.out.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(rc.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << rc.out << '\n';
      return kExitUsage;
    }
    file << buffer.str();
  }
  if (status == kExitFail && !rc.out.empty()) err << buffer.str();
  return status;
}

}  // namespace expsamp::cli

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "expsamp/operators.hpp"

namespace expsamp {

/// Probe point of a reference error table with its reference errors, one per w.
struct TableRow {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> reference;
};

struct TablePreset {
  std::string name;
  std::string function_id;
  std::vector<double> w_values;
  std::vector<TableRow> rows;
  double tolerance = 0.0;  // absolute agreement required with the reference
  std::string note;
};

/// "table1" (sin(x^2-y^2), w = 10, 40) or "table2" (y^2 + cos(pi x), w = 8, 35).
TablePreset table_preset(const std::string& name);

struct GridPreset {
  std::string name;
  std::string function_id;
  Rect domain{};
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> w_values;
};

/// "fig1" or "fig2".
GridPreset grid_preset(const std::string& name);

}  // namespace expsamp

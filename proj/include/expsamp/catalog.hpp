#pragma once

#include <string>
#include <vector>

#include "expsamp/analysis.hpp"
#include "expsamp/operators.hpp"

namespace expsamp {

/// A named test function with whatever is known about it in closed form.
struct CatalogFunction {
  std::string id;
  std::string description;
  TargetFunction function;
  FunctionFacts facts;
};

/// Resolves one of
///   sin-x2-y2    sin(x^2 - y^2) on [0.05, 2]^2
///   y2-cos-pix   y^2 + cos(pi x) on [1, 4]^2
///   log-sum      log x + log y
///   log-product  log x * log y
///   const:c      the constant c
///   pow:a:b      x^a y^b
/// ConfigError for anything else.
CatalogFunction function_from_id(const std::string& id);

std::vector<std::string> catalog_ids();

}  // namespace expsamp

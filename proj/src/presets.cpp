#include "expsamp/presets.hpp"

#include "expsamp/errors.hpp"

namespace expsamp {

TablePreset table_preset(const std::string& name) {
  if (name == "table1") {
    return TablePreset{"table1",
                       "sin-x2-y2",
                       {10.0, 40.0},
                       {{0.2, 0.1, {0.0033, 0.0008}},
                        {0.6, 0.5, {0.0119, 0.0028}},
                        {1.1, 0.9, {0.0366, 0.0092}},
                        {1.9, 1.8, {0.0185, 0.0052}}},
                       1e-3,
                       ""};
  }
  if (name == "table2") {
    // Reference errors are reproduced at w=8, not w=5.
    return TablePreset{"table2",
                       "y2-cos-pix",
                       {8.0, 35.0},
                       {{1.3, 1.6, {0.6079, 0.1254}},
                        {1.9, 1.7, {0.3958, 0.1036}},
                        {2.8, 2.4, {0.7695, 0.1057}},
                        {3.6, 3.9, {2.4188, 0.5949}}},
                       1e-2,
                       "reference errors correspond to w=8"};
  }
  throw ConfigError("unknown table preset '" + name + "'");
}

GridPreset grid_preset(const std::string& name) {
  if (name == "fig1") return GridPreset{"fig1", "sin-x2-y2", {0.05, 2.0, 0.05, 2.0}, 80, 80, {10.0, 40.0}};
  if (name == "fig2") return GridPreset{"fig2", "y2-cos-pix", {1.0, 4.0, 1.0, 4.0}, 80, 80, {8.0, 35.0}};
  throw ConfigError("unknown grid preset '" + name + "'");
}

}  // namespace expsamp

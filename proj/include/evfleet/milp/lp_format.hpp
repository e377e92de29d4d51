#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "evfleet/milp/model.hpp"

namespace evfleet::milp {

// Writes the model in CPLEX LP text format. Names are sanitised to the
// identifier alphabet of the format and made unique.
void WriteLp(const MilpModel& model, std::ostream& out);
std::string ToLpString(const MilpModel& model);
void ExportModel(const MilpModel& model, const std::filesystem::path& path);

}  // namespace evfleet::milp

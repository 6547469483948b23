#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "poromfe/stepper.hpp"
#include "poromfe/verify.hpp"

namespace poromfe {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

/// Header h,L2_u,rate,H1_u,rate,L2_p,rate,H1_p,rate; h written as 1/n and
/// the undefined first-row rates left empty.
void write_rates_csv(std::ostream& os, const RateTable& table);
void write_rates_pretty(std::ostream& os, const RateTable& table);

void write_monitors_csv(std::ostream& os, const MonitorLog& log);
void write_monitors_pretty(std::ostream& os, const MonitorLog& log);

/// Legacy VTK ASCII: mesh vertices with point data u (vector), p, xi, eta.
void write_solution_vtk(std::ostream& os, const MfeaSolver& solver, const SystemState& state);

/// Writes through a temporary file in the same directory and renames it
/// into place, so a failure leaves nothing behind. Throws std::runtime_error
/// naming the path.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace poromfe

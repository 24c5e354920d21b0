#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qcsim/diagnostics.hpp"
#include "qcsim/dynamics.hpp"

namespace qcsim {

/// Column order of the time-series table.
inline constexpr const char* kTimeseriesHeader =
    "step,t,E_total,E_kinetic,E_phason_potential,E_grad_u,E_grad_nu,E_div_u,E_div_nu,E_cross_grad,E_cross_div,"
    "dissipated_step,gyro_power,balance_residual,nu_t_maxnorm";

void write_timeseries(const Trajectory& traj, std::ostream& out);

/// Header lines `dim`, `n`, `h`, `t`, then one row per interior node in
/// lexicographic order (i slowest):
///   i j [k] u1 u2 u3 ut1 ut2 ut3 nu1 nu2 nu3
void write_snapshot(const FieldState& s, std::ostream& out);

/// Reads a snapshot onto `grid`; boundary values come from the grid data.
/// Throws std::runtime_error on malformed input or a grid mismatch.
FieldState read_snapshot(std::istream& in, GridPtr grid);

void write_viscosity_table(const ConvergenceTable& t, std::ostream& out);
void write_mms_table(const MmsTable& t, std::ostream& out);
void write_difference_table(const DifferenceReport& r, std::ostream& out);
void write_bound_table(const Trajectory& traj, const BoundReport& b, std::ostream& out);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `text` to `path`, creating parent directories; throws IoError.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace qcsim

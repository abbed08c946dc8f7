#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cohbudget/budget.hpp"
#include "cohbudget/calibration.hpp"
#include "cohbudget/mc.hpp"
#include "cohbudget/split.hpp"

namespace cohbudget::io {

/// Shortest round-trippable decimal with at least 9 significant digits.
std::string format_number(double v);

// header: axis,axis_value,format,n_pol,baud_hz,raw_bit_rate_bps,tx_power_dbm,
//         sensitivity_dbm,opb_db,feasible
void write_sweep_csv(std::ostream& os, const budget::SweepResult& result);

// header: rho,y_value,opb_db,feasible  (infeasible cells leave opb_db empty)
void write_grid_csv(std::ostream& os, const split::OpbGrid& grid);

// header: format,snr_db,ber_formula,ber_mc,n_bits,rel_error,within_tol
void write_mc_csv(std::ostream& os, const mc::ValidationReport& report);

/// Reads `format,baud_hz,lo_power_dbm,signal_power_dbm,ber` rows, grouping
/// consecutive rows with identical (format, baud, LO power) into curves.
std::vector<calib::BerCurve> read_ber_curves_csv(std::istream& is);

void write_ber_curves_csv(std::ostream& os, const std::vector<calib::BerCurve>& curves);

/// Reads `bandwidth_hz,irnd_pa_sqrthz` rows (densities converted to SI).
calib::TiaDataset read_tia_csv(std::istream& is);

} // namespace cohbudget::io

#include "cohbudget/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cohbudget::io {

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_sweep_csv(std::ostream& os, const budget::SweepResult& result)
{
    os << "axis,axis_value,format,n_pol,baud_hz,raw_bit_rate_bps,tx_power_dbm,"
          "sensitivity_dbm,opb_db,feasible\n";
    const std::string axis = budget::to_string(result.axis);
    for (const auto& r : result.rows) {
        os << axis << ',' << format_number(r.axis_value) << ',' << r.format << ','
           << r.n_pol << ',' << format_number(r.baud_hz) << ','
           << format_number(r.raw_bit_rate_bps) << ',' << format_number(r.tx_power_dbm)
           << ',';
        if (r.sensitivity_dbm) os << format_number(*r.sensitivity_dbm);
        os << ',';
        if (r.opb_db) os << format_number(*r.opb_db);
        os << ',' << (r.feasible() ? "true" : "false") << '\n';
    }
}

void write_grid_csv(std::ostream& os, const split::OpbGrid& grid)
{
    os << "rho,y_value,opb_db,feasible\n";
    for (size_t iy = 0; iy < grid.y.size(); ++iy) {
        for (size_t ix = 0; ix < grid.rho.size(); ++ix) {
            const auto& cell = grid.at(iy, ix);
            os << format_number(grid.rho[ix]) << ',' << format_number(grid.y[iy]) << ',';
            if (cell) os << format_number(*cell);
            os << ',' << (cell ? "true" : "false") << '\n';
        }
    }
}

void write_mc_csv(std::ostream& os, const mc::ValidationReport& report)
{
    os << "format,snr_db,ber_formula,ber_mc,n_bits,rel_error,within_tol\n";
    for (const auto& r : report.rows) {
        os << report.format << ',' << format_number(r.snr_db) << ','
           << format_number(r.ber_formula) << ',' << format_number(r.ber_mc) << ','
           << r.n_bits << ',' << format_number(r.rel_error) << ','
           << (r.within_tol ? "true" : "false") << '\n';
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

double parse_double(const std::string& s, const char* what)
{
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("bad numeric field for ") + what + ": '" +
                                 s + "'");
    }
}

void expect_header(const std::string& got, const std::string& want)
{
    if (got != want)
        throw std::runtime_error("unexpected CSV header: '" + got + "' (want '" + want +
                                 "')");
}

} // namespace

std::vector<calib::BerCurve> read_ber_curves_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty BER curve file");
    expect_header(line, "format,baud_hz,lo_power_dbm,signal_power_dbm,ber");

    std::vector<calib::BerCurve> curves;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 5)
            throw std::runtime_error("BER curve row needs 5 fields: '" + line + "'");
        const auto format = ModulationFormat::from_name(f[0]);
        const double baud = parse_double(f[1], "baud_hz");
        const double lo = parse_double(f[2], "lo_power_dbm");
        const double ps = parse_double(f[3], "signal_power_dbm");
        const double b = parse_double(f[4], "ber");

        if (curves.empty() || curves.back().format.name != format.name ||
            curves.back().baud_hz != baud || curves.back().lo_power_dbm != lo) {
            calib::BerCurve c;
            c.format = format;
            c.baud_hz = baud;
            c.lo_power_dbm = lo;
            curves.push_back(std::move(c));
        }
        curves.back().points.emplace_back(ps, b);
    }
    for (const auto& c : curves) c.validate();
    return curves;
}

void write_ber_curves_csv(std::ostream& os, const std::vector<calib::BerCurve>& curves)
{
    os << "format,baud_hz,lo_power_dbm,signal_power_dbm,ber\n";
    for (const auto& c : curves)
        for (const auto& [ps, b] : c.points)
            os << c.format.name << ',' << format_number(c.baud_hz) << ','
               << format_number(c.lo_power_dbm) << ',' << format_number(ps) << ','
               << format_number(b) << '\n';
}

calib::TiaDataset read_tia_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty TIA file");
    expect_header(line, "bandwidth_hz,irnd_pa_sqrthz");

    calib::TiaDataset data;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 2)
            throw std::runtime_error("TIA row needs 2 fields: '" + line + "'");
        data.points.emplace_back(parse_double(f[0], "bandwidth_hz"),
                                 parse_double(f[1], "irnd_pa_sqrthz") * 1e-12);
    }
    data.validate();
    return data;
}

} // namespace cohbudget::io

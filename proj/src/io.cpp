#include "poromfe/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace poromfe {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string format_fixed(double v, int precision, bool scientific) {
    if (!std::isfinite(v)) return format_number(v);
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                   scientific ? std::chars_format::scientific : std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_rates_csv(std::ostream& os, const RateTable& table) {
    os << "h,L2_u,rate,H1_u,rate,L2_p,rate,H1_p,rate\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const RateRow& r = table.rows[i];
        os << "1/" << r.n;
        for (int k = 0; k < 4; ++k) {
            os << ',' << format_number(r.error[k]) << ',';
            if (i > 0) os << format_number(r.rate[k]);
        }
        os << '\n';
    }
}

void write_rates_pretty(std::ostream& os, const RateTable& table) {
    const char* names[] = {"L2_u", "H1_u", "L2_p", "H1_p"};
    os << std::left << std::setw(8) << "h";
    for (const char* n : names) os << std::right << std::setw(14) << n << std::setw(8) << "rate";
    os << '\n';
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const RateRow& r = table.rows[i];
        os << std::left << std::setw(8) << ("1/" + std::to_string(r.n));
        for (int k = 0; k < 4; ++k) {
            os << std::right << std::setw(14) << format_fixed(r.error[k], 4, true) << std::setw(8)
               << (i > 0 ? format_fixed(r.rate[k], 3, false) : std::string("-"));
        }
        os << '\n';
    }
}

void write_monitors_csv(std::ostream& os, const MonitorLog& log) {
    os << "step,time,newton_iterations,eta_residual,xi_residual,flux_residual,energy_residual,J,S,S_hat,S_alt\n";
    for (const auto& r : log.rows) {
        os << r.step << ',' << format_number(r.time) << ',' << r.newton_iterations << ','
           << format_number(r.conservation.eta) << ',' << format_number(r.conservation.xi) << ','
           << format_number(r.conservation.flux) << ',' << format_number(r.energy_residual) << ','
           << format_number(r.J) << ',' << format_number(r.S) << ',' << format_number(r.S_hat) << ','
           << format_number(r.S_alt) << '\n';
    }
}

void write_monitors_pretty(std::ostream& os, const MonitorLog& log) {
    const char* names[] = {"time", "newton", "eta_res", "xi_res", "flux_res", "energy_res", "J", "S"};
    os << std::setw(6) << "step";
    for (const char* n : names) os << std::setw(12) << n;
    os << '\n';
    for (const auto& r : log.rows) {
        os << std::setw(6) << r.step << std::setw(12) << format_fixed(r.time, 5, false) << std::setw(12)
           << r.newton_iterations;
        for (double v : {r.conservation.eta, r.conservation.xi, r.conservation.flux, r.energy_residual, r.J, r.S})
            os << std::setw(12) << format_fixed(v, 3, true);
        os << '\n';
    }
}

void write_solution_vtk(std::ostream& os, const MfeaSolver& solver, const SystemState& state) {
    const Mesh& mesh = solver.mesh();
    const DofMap& vdofs = solver.displacement_space();
    const int nv = mesh.num_vertices();
    os << "# vtk DataFile Version 3.0\n";
    os << solver.scenario().name << " t=" << format_number(state.time) << "\n";
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nv << " double\n";
    for (const auto& v : mesh.vertices()) os << format_number(v.x) << ' ' << format_number(v.y) << " 0\n";
    os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << mesh.num_triangles() << '\n';
    for (int c = 0; c < mesh.num_triangles(); ++c) os << "5\n";
    os << "POINT_DATA " << nv << '\n';
    os << "VECTORS u double\n";
    for (int i = 0; i < nv; ++i)
        os << format_number(state.u[vdofs.dof(i, 0)]) << ' ' << format_number(state.u[vdofs.dof(i, 1)]) << " 0\n";
    auto scalar = [&](const char* name, const Vector& v) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int i = 0; i < nv; ++i) os << format_number(v[i]) << '\n';
    };
    scalar("p", state.p);
    scalar("xi", state.xi);
    scalar("eta", state.eta);
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out.imbue(std::locale::classic());
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path.string());
    }
}

}  // namespace poromfe

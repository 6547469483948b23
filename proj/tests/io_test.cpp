#include <gtest/gtest.h>

#include <clocale>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "poromfe/io.hpp"

using namespace poromfe;
namespace fs = std::filesystem;

namespace {

RateTable sample_table() {
    return make_rate_table({3, 6}, {{{1e-6, 2e-5, 0.03, 0.4}}, {{2.5e-7, 1e-5, 0.0075, 0.2}}});
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(2.5e-7), "2.5e-07");
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    const double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(RatesCsv, HeaderAndRows) {
    std::ostringstream os;
    write_rates_csv(os, sample_table());
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "h,L2_u,rate,H1_u,rate,L2_p,rate,H1_p,rate");
    std::getline(in, line);
    EXPECT_EQ(line, "1/3,1e-06,,2e-05,,0.03,,0.4,");
    std::getline(in, line);
    EXPECT_EQ(line, "1/6,2.5e-07,2,1e-05,1,0.0075,2,0.2,1");
    EXPECT_FALSE(std::getline(in, line));
}

TEST(RatesCsv, IndependentOfGlobalLocale) {
    std::ostringstream a;
    write_rates_csv(a, sample_table());
    const char* old = std::setlocale(LC_ALL, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_ALL, "de_DE.UTF-8")) {
        std::ostringstream b;
        write_rates_csv(b, sample_table());
        EXPECT_EQ(a.str(), b.str());
    }
    std::setlocale(LC_ALL, saved.c_str());
    EXPECT_EQ(a.str().find(",5"), std::string::npos);
}

TEST(RatesPretty, AlignedColumns) {
    std::ostringstream os;
    write_rates_pretty(os, sample_table());
    std::istringstream in(os.str());
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    EXPECT_NE(l1.find("L2_u"), std::string::npos);
    EXPECT_EQ(l2.size(), l3.size());
}

TEST(MonitorsCsv, HeaderAndRowCount) {
    MonitorLog log;
    log.rows.resize(2);
    log.rows[1].step = 2;
    log.rows[1].time = 0.25;
    std::ostringstream os;
    write_monitors_csv(os, log);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "step,time,newton_iterations,eta_residual,xi_residual,flux_residual,energy_residual,J,S,S_hat,"
                    "S_alt");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10);
    }
    EXPECT_EQ(rows, 2);
}

SchemeConfig small_scheme() {
    SchemeConfig c;
    c.dt = 0.25;
    c.final_time = 0.5;
    return c;
}

TEST(SolutionVtk, WellFormedLegacyFile) {
    MfeaSolver solver(build_uniform_mesh(2), test1(param_set("test1-soft")), small_scheme());
    const auto t = run(solver, {}, false);
    std::ostringstream os;
    write_solution_vtk(os, solver, t.states.back());
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "# vtk DataFile Version 3.0");
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line, "ASCII");
    std::getline(in, line);
    EXPECT_EQ(line, "DATASET UNSTRUCTURED_GRID");
    const std::string s = os.str();
    EXPECT_NE(s.find("POINTS 9 double"), std::string::npos);
    EXPECT_NE(s.find("CELLS 8 32"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 8"), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA 9"), std::string::npos);
    EXPECT_NE(s.find("VECTORS u double"), std::string::npos);
    for (const char* name : {"SCALARS p double 1", "SCALARS xi double 1", "SCALARS eta double 1"})
        EXPECT_NE(s.find(name), std::string::npos) << name;
    // Each scalar block has a lookup table line and one value per point.
    const auto pos = s.find("SCALARS eta double 1");
    std::istringstream tail(s.substr(pos));
    std::getline(tail, line);
    std::getline(tail, line);
    EXPECT_EQ(line, "LOOKUP_TABLE default");
    int values = 0;
    while (std::getline(tail, line) && !line.empty()) ++values;
    EXPECT_EQ(values, 9);
}

TEST(AtomicWrite, ReplacesTargetAndCleansUpOnFailure) {
    const fs::path dir = fs::temp_directory_path() / "poromfe_io_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path target = dir / "out.csv";
    write_file_atomic(target, [](std::ostream& os) { os << "a\n"; });
    std::ifstream in(target);
    std::string text;
    std::getline(in, text);
    EXPECT_EQ(text, "a");
    EXPECT_THROW(write_file_atomic(dir / "bad.csv", [](std::ostream&) { throw std::runtime_error("boom"); }),
                 std::runtime_error);
    EXPECT_FALSE(fs::exists(dir / "bad.csv"));
    EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator()), 1);
    try {
        write_file_atomic(dir / "missing" / "x.csv", [](std::ostream& os) { os << 1; });
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
    }
    fs::remove_all(dir);
}

}  // namespace

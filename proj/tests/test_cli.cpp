#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wke/io.hpp"

using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("WKE_CLI");
    REQUIRE_MESSAGE(p != nullptr, "WKE_CLI must point at the CLI binary");
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    REQUIRE(os.good());
    os << text;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE_MESSAGE(is.good(), ("missing file: " + path).c_str());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json read_manifest(const std::string& dir) {
    return json::parse(read_file(dir + "/manifest.json"));
}

}  // namespace

TEST_CASE("kernel-table writes a table, a manifest and valid checksums") {
    write_file("cli_kt.json", R"({"n": 1024, "half_length": 20.0})");
    CHECK(run_cli("--config cli_kt.json --out cli_out_kt kernel-table") == 0);
    const json m = read_manifest("cli_out_kt");
    CHECK(m.at("serial_mode").get<bool>());
    CHECK(m.at("config").at("n").get<std::size_t>() == 1024);
    CHECK(m.at("config").at("half_length").get<double>() == 20.0);
    CHECK(m.at("derived_constants").contains("c0"));
    CHECK(m.at("derived_constants").contains("k_norm_1"));
    REQUIRE(m.at("outputs").size() == 1);
    const json& out = m.at("outputs")[0];
    CHECK(out.at("row_count").get<std::size_t>() == 1024);
    const std::string csv = read_file(out.at("path").get<std::string>());
    CHECK(out.at("checksum_fnv1a").get<std::uint64_t>() == wke::fnv1a(csv));

    // CSV shape: header plus one row per grid point, 4 columns each.
    std::istringstream is(csv);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "x,K,Kprime,envelope_bound");
    std::size_t rows = 0, commas_ok = 0;
    while (std::getline(is, line)) {
        ++rows;
        std::size_t commas = 0;
        for (char c : line) commas += (c == ',');
        commas_ok += (commas == 3);
    }
    CHECK(rows == 1024);
    CHECK(commas_ok == rows);
}

TEST_CASE("numeric output is round-trip exact") {
    // Values are printed with 17 significant digits, so parsing them back
    // reproduces the stored doubles bit for bit.
    const std::string csv = read_file("cli_out_kt/kernel_table.csv");
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);  // header
    std::size_t checked = 0;
    while (std::getline(is, line) && checked < 200) {
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            const double v = std::strtod(cell.c_str(), nullptr);
            CHECK(wke::format_double(v) == cell);
            ++checked;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("repeated runs are bit-identical") {
    write_file("cli_det.json", R"({"theta": 0.5, "count": 33})");
    CHECK(run_cli("--config cli_det.json --out cli_out_det_a spectral-scan") == 0);
    CHECK(run_cli("--config cli_det.json --out cli_out_det_b spectral-scan") == 0);
    CHECK(read_file("cli_out_det_a/spectral_scan.csv") ==
          read_file("cli_out_det_b/spectral_scan.csv"));
    const json ma = read_manifest("cli_out_det_a"), mb = read_manifest("cli_out_det_b");
    CHECK(ma.at("outputs")[0].at("checksum_fnv1a") == mb.at("outputs")[0].at("checksum_fnv1a"));
    CHECK(ma.at("derived_constants") == mb.at("derived_constants"));
}

TEST_CASE("spectral-scan manifest carries the calibrated constants") {
    const json m = read_manifest("cli_out_det_a");
    const json& d = m.at("derived_constants");
    CHECK(d.at("gamma").get<double>() == doctest::Approx(-9.42113161067766859).epsilon(1e-12));
    CHECK(d.at("omega_3i4").get<double>() ==
          doctest::Approx(-0.157211577377052881).epsilon(1e-9));
    CHECK(d.at("nu").get<double>() == -d.at("omega_3i4").get<double>());
}

TEST_CASE("linear-evolve runs in both modes with consistent artifacts") {
    write_file("cli_le.json",
               R"({"n": 2048, "half_length": 30.0, "tilt": 0.5, "times": [0.25, 0.5]})");
    CHECK(run_cli("--config cli_le.json --out cli_out_le linear-evolve") == 0);
    const json m = read_manifest("cli_out_le");
    REQUIRE(m.at("outputs").size() == 2);
    CHECK(m.at("outputs")[0].at("row_count").get<std::size_t>() == 2048);
    CHECK(m.at("outputs")[1].at("row_count").get<std::size_t>() == 3);  // t = 0, 0.25, 0.5

    write_file("cli_lt.json",
               R"({"n": 1024, "half_length": 30.0, "tilt": 0.5, "times": [0.2],)"
               R"( "method": "timestep", "dt": 0.01})");
    CHECK(run_cli("--config cli_lt.json --out cli_out_lt linear-evolve") == 0);
}

TEST_CASE("nonlinear-evolve and the scaling experiment report condensation") {
    write_file("cli_ne.json", R"({"atom_count": 48, "amplitude": 4.0, "t_end": 1.0})");
    CHECK(run_cli("--config cli_ne.json --out cli_out_ne nonlinear-evolve") == 0);
    const json mn = read_manifest("cli_out_ne");
    CHECK(mn.at("derived_constants").at("initial_mass").get<double>() ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK(mn.at("derived_constants").at("condensation_time").get<double>() > 0.0);

    write_file("cli_cs.json", R"({"atom_count": 48, "horizon": 5.0})");
    CHECK(run_cli("--config cli_cs.json --out cli_out_cs experiment condensation-scaling") == 0);
    const json mc = read_manifest("cli_out_cs");
    CHECK(mc.at("derived_constants").at("complete").get<bool>());
    CHECK(mc.at("derived_constants").at("slope").get<double>() ==
          doctest::Approx(-2.0).epsilon(0.15));
}

TEST_CASE("configuration errors exit with code 2") {
    write_file("cli_bad_theta.json", R"({"theta": 3.0})");
    CHECK(run_cli("--config cli_bad_theta.json --out cli_out_err spectral-scan") == 2);
    write_file("cli_bad_key.json", R"({"no_such_key": 1})");
    CHECK(run_cli("--config cli_bad_key.json --out cli_out_err kernel-table") == 2);
    write_file("cli_bad_json.json", "this is not json");
    CHECK(run_cli("--config cli_bad_json.json --out cli_out_err kernel-table") == 2);
    write_file("cli_bad_type.json", R"({"n": "many"})");
    CHECK(run_cli("--config cli_bad_type.json --out cli_out_err kernel-table") == 2);
    CHECK(run_cli("--config cli_missing_file.json --out cli_out_err kernel-table") == 2);
    CHECK(run_cli("no-such-subcommand") == 2);
    CHECK(run_cli("") == 2);  // a subcommand is required
}

TEST_CASE("precondition violations exit with code 3") {
    // Equilibrium cutoff above the grid top: the data support is not covered.
    write_file("cli_pc.json", R"({"b_cut": 1000.0, "atom_count": 24, "t_end": 0.1})");
    CHECK(run_cli("--config cli_pc.json --out cli_out_err nonlinear-evolve") == 3);
}

TEST_CASE("numeric failures exit with code 4") {
    // A one-sample spike has a flat spectrum; on this coarse grid the top 1%
    // of modes keep more than 1e-6 of the energy after propagation.
    write_file("cli_nf.json",
               R"({"n": 256, "half_length": 40.0, "times": [0.5],)"
               R"( "data_width": 0.05, "data_center": 0.15625})");
    CHECK(run_cli("--config cli_nf.json --out cli_out_err linear-evolve") == 4);
}

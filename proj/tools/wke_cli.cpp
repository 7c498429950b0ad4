// Command-line front end: kernel tabulation, spectral scans, linear and
// nonlinear evolution, the condensation-scaling experiment and the acceptance
// suite.  Every run writes CSV result tables plus a JSON manifest with the
// echoed configuration, derived constants and FNV-1a checksums of each
// artifact.  Exit codes: 0 success, 2 configuration error, 3 precondition
// violation, 4 numeric failure, 1 anything else.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wke/acceptance.hpp"
#include "wke/condensation.hpp"
#include "wke/io.hpp"
#include "wke/kernel.hpp"
#include "wke/linear.hpp"
#include "wke/spectral.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "out";
    bool serial = false;
    bool verbose = false;
};

json load_config(const GlobalOpts& g, const std::set<std::string>& allowed_keys) {
    json cfg = json::object();
    if (!g.config_path.empty()) {
        std::ifstream is(g.config_path);
        if (!is) throw wke::config_error("cannot open config file " + g.config_path);
        try {
            is >> cfg;
        } catch (const std::exception& e) {
            throw wke::config_error(std::string("config parse failure: ") + e.what());
        }
        if (!cfg.is_object()) throw wke::config_error("config root must be a JSON object");
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (!allowed_keys.count(it.key())) {
            std::string valid;
            for (const auto& k : allowed_keys) valid += (valid.empty() ? "" : ", ") + k;
            throw wke::config_error("unknown config key '" + it.key() + "' (valid keys: " +
                                    valid + ")");
        }
    }
    return cfg;
}

template <typename T>
T cfg_get(const json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const std::exception&) {
        throw wke::config_error("config key '" + key + "' has the wrong type");
    }
}

void finish(wke::OutputWriter& writer, wke::RunManifest manifest, const GlobalOpts& g) {
    manifest.serial_mode = true;  // single-threaded implementation throughout
    const wke::OutputRecord rec = writer.write_json("manifest", manifest.to_json());
    if (g.verbose) {
        for (const auto& o : manifest.outputs)
            std::fprintf(stderr, "wrote %s (%zu rows, checksum %016llx)\n", o.path.c_str(),
                         o.row_count, static_cast<unsigned long long>(o.checksum));
        std::fprintf(stderr, "wrote %s\n", rec.path.c_str());
    }
}

// --- kernel-table -----------------------------------------------------------

int cmd_kernel_table(const GlobalOpts& g) {
    const json cfg = load_config(g, {"half_length", "n", "x_max", "exclusion"});
    const double half_length = cfg_get(cfg, "half_length", 40.0);
    const std::size_t n = cfg_get<std::size_t>(cfg, "n", 1u << 14);
    const double x_max = cfg_get(cfg, "x_max", wke::default_x_max);
    const double exclusion = cfg_get(cfg, "exclusion", wke::default_exclusion_x);
    if (!(half_length > 0.0) || n < 2 || (n & (n - 1)) != 0)
        throw wke::config_error("kernel-table: half_length must be > 0 and n a power of two >= 2");

    const wke::KernelTable table = wke::KernelTable::build(half_length, n, x_max, exclusion);
    wke::CsvTable csv;
    csv.header = {"x", "K", "Kprime", "envelope_bound"};
    for (std::size_t j = 0; j < table.x_grid.size(); ++j)
        csv.rows.push_back({table.x_grid[j], table.k_values[j], table.kprime_values[j],
                            wke::tail_envelope(table.x_grid[j])});

    wke::OutputWriter writer(g.out_dir);
    wke::RunManifest manifest;
    manifest.config_echo = {{"half_length", half_length}, {"n", n},
                            {"x_max", x_max}, {"exclusion", exclusion}};
    manifest.derived_constants = {{"c0", wke::kernel_c0},
                                  {"k_norm_1", wke::k_norm(1.0)},
                                  {"k_norm_1_weighted", wke::k_norm(1.0, wke::k_weight::exp_half_x)}};
    manifest.outputs.push_back(writer.write_csv("kernel_table", csv));
    finish(writer, manifest, g);
    return 0;
}

// --- spectral-scan ----------------------------------------------------------

int cmd_spectral_scan(const GlobalOpts& g) {
    const json cfg = load_config(g, {"theta", "re_min", "re_max", "count"});
    const double theta = cfg_get(cfg, "theta", 0.0);
    const double re_min = cfg_get(cfg, "re_min", -20.0);
    const double re_max = cfg_get(cfg, "re_max", 20.0);
    const std::size_t count = cfg_get<std::size_t>(cfg, "count", 201);
    if (!(theta > -1.0 && theta < 2.5))
        throw wke::config_error("spectral-scan: theta = " + wke::format_double(theta) +
                                " outside the valid line range (-1, 2.5)");
    if (!(re_max > re_min) || count < 2)
        throw wke::config_error("spectral-scan: need re_max > re_min and count >= 2");

    const wke::SpectralContext ctx = wke::calibrate_gamma();
    wke::CsvTable csv;
    csv.header = {"re_xi", "im_xi", "khat_re", "khat_im", "omega_re", "omega_im"};
    for (std::size_t i = 0; i < count; ++i) {
        const double re = re_min + (re_max - re_min) * static_cast<double>(i) /
                                       static_cast<double>(count - 1);
        const wke::complex_t kh = wke::fourier_K({re, theta}, ctx.quad);
        const wke::complex_t om = ctx.gamma + kh;
        csv.rows.push_back({re, theta, kh.real(), kh.imag(), om.real(), om.imag()});
    }

    wke::OutputWriter writer(g.out_dir);
    wke::RunManifest manifest;
    manifest.config_echo = {{"theta", theta}, {"re_min", re_min}, {"re_max", re_max},
                            {"count", count}};
    manifest.derived_constants = {
        {"gamma", ctx.gamma},
        {"gamma_N", ctx.gamma_N},
        {"omega_3i4", ctx.omega_mellin({0.0, 0.75}).real()},
        {"wsecond_3half", wke::w_derivative(ctx, {1.5, 0.0}, 2).real()},
        {"nu", -ctx.omega_mellin({0.0, 0.75}).real()}};
    manifest.outputs.push_back(writer.write_csv("spectral_scan", csv));
    finish(writer, manifest, g);
    return 0;
}

// --- linear-evolve ----------------------------------------------------------

int cmd_linear_evolve(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"half_length", "n", "tilt", "method", "dt", "times", "data", "data_center",
            "data_width", "moment_orders"});
    const double half_length = cfg_get(cfg, "half_length", 40.0);
    const std::size_t n = cfg_get<std::size_t>(cfg, "n", 1u << 13);
    const double tilt = cfg_get(cfg, "tilt", 0.0);
    const std::string method = cfg_get<std::string>(cfg, "method", "spectral");
    const double dt = cfg_get(cfg, "dt", 2e-3);
    const std::vector<double> times = cfg_get(cfg, "times", std::vector<double>{0.5, 1.0, 2.0});
    const std::string data = cfg_get<std::string>(cfg, "data", "gaussian");
    const double center = cfg_get(cfg, "data_center", 0.0);
    const double width = cfg_get(cfg, "data_width", 1.0);
    const std::vector<double> orders =
        cfg_get(cfg, "moment_orders", std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.5});
    if (method != "spectral" && method != "timestep")
        throw wke::config_error("linear-evolve: method must be 'spectral' or 'timestep'");
    if (data != "gaussian")
        throw wke::config_error("linear-evolve: data must be 'gaussian'");
    if (!(width > 0.0)) throw wke::config_error("linear-evolve: data_width must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw wke::config_error("linear-evolve: times must be strictly increasing");
    if (times.empty() || times.front() <= 0.0)
        throw wke::config_error("linear-evolve: need at least one positive time");

    const wke::SpectralContext ctx = wke::calibrate_gamma();
    wke::LinearPropagator prop(ctx.gamma, half_length, n, tilt);
    wke::LinearField f0 = prop.make_grid_field(
        [&](double x) { return std::exp(-wke::sqr((x - center) / width)); });

    std::vector<wke::LinearField> snaps;
    if (method == "spectral") {
        for (double t : times) snaps.push_back(prop.spectral_propagate(f0, t));
    } else {
        wke::LinearField cur = f0;
        double prev = 0.0;
        for (double t : times) {
            cur = prop.timestep_propagate_richardson(cur, t - prev, dt);
            prev = t;
            snaps.push_back(cur);
        }
    }

    wke::CsvTable field_csv;
    field_csv.header = {"x", "f_initial"};
    for (double t : times) field_csv.header.push_back("f_t" + wke::format_double(t));
    for (std::size_t j = 0; j < f0.x_grid.size(); ++j) {
        std::vector<double> row{f0.x_grid[j], f0.values[j]};
        for (const auto& s : snaps) row.push_back(s.values[j]);
        field_csv.rows.push_back(std::move(row));
    }

    wke::MomentLedger ledger;
    ledger.r_values = orders;
    ledger.record(f0);
    for (const auto& s : snaps) ledger.record(s);
    wke::CsvTable mom_csv;
    mom_csv.header = {"t"};
    for (double r : orders) mom_csv.header.push_back("M_r" + wke::format_double(r));
    for (std::size_t i = 0; i < ledger.times.size(); ++i) {
        std::vector<double> row{ledger.times[i]};
        for (double v : ledger.table[i]) row.push_back(v);
        mom_csv.rows.push_back(std::move(row));
    }

    wke::OutputWriter writer(g.out_dir);
    wke::RunManifest manifest;
    manifest.config_echo = {{"half_length", half_length}, {"n", n}, {"tilt", tilt},
                            {"method", method}, {"dt", dt}, {"times", times},
                            {"data", data}, {"data_center", center}, {"data_width", width},
                            {"moment_orders", orders}};
    manifest.derived_constants = {{"gamma", ctx.gamma},
                                  {"gamma_N", ctx.gamma_N},
                                  {"k_norm_1_discrete", prop.norm1_weights()}};
    manifest.outputs.push_back(writer.write_csv("linear_field", field_csv));
    manifest.outputs.push_back(writer.write_csv("linear_moments", mom_csv));
    finish(writer, manifest, g);
    return 0;
}

// --- nonlinear-evolve -------------------------------------------------------

int cmd_nonlinear_evolve(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"amplitude", "b_cut", "omega_min", "omega_max", "atom_count", "t_end",
            "snapshot_times", "dt_max", "threshold"});
    const double amplitude = cfg_get(cfg, "amplitude", 1.0);
    const double b_cut = cfg_get(cfg, "b_cut", 1.0);
    const double omega_min = cfg_get(cfg, "omega_min", 1e-4);
    const double omega_max = cfg_get(cfg, "omega_max", 1e2);
    const std::size_t atom_count = cfg_get<std::size_t>(cfg, "atom_count", 96);
    const double t_end = cfg_get(cfg, "t_end", 10.0);
    const double threshold = cfg_get(cfg, "threshold", 1e-3);
    wke::EvolveOptions opt;
    opt.dt_max = cfg_get(cfg, "dt_max", opt.dt_max);
    opt.snapshot_times = cfg_get(cfg, "snapshot_times", std::vector<double>{});
    if (opt.snapshot_times.empty())
        for (int i = 0; i <= 20; ++i) opt.snapshot_times.push_back(t_end * i / 20.0);
    if (!(amplitude > 0.0 && b_cut > 0.0 && t_end > 0.0 && threshold > 0.0))
        throw wke::config_error("nonlinear-evolve: amplitude, b_cut, t_end, threshold must be positive");

    const std::vector<double> grid = wke::geometric_grid(omega_min, omega_max, atom_count);
    wke::MeasureState st = wke::make_rj_truncated(amplitude, b_cut, grid);
    const std::vector<wke::MeasureState> traj = wke::evolve(st, t_end, opt);

    wke::CsvTable traj_csv;
    traj_csv.header = {"t", "condensate", "total_mass", "total_energy",
                       "clipped_mass", "overflow_flux", "n_half", "a_half"};
    for (const auto& s : traj) {
        const wke::CondensationFunctionals fn = wke::n_functional(s, grid.front() * 10.0, 0.5);
        traj_csv.rows.push_back({s.time, s.condensate, s.total_mass(), s.total_energy(),
                                 s.ledger.clipped_mass, s.ledger.overflow_flux, fn.n_value,
                                 fn.a_value});
    }
    wke::CsvTable atoms_csv;
    atoms_csv.header = {"omega", "g_initial", "g_final"};
    for (std::size_t i = 0; i < grid.size(); ++i)
        atoms_csv.rows.push_back({grid[i], st.g[i], traj.back().g[i]});

    const double t_star = wke::condensation_time(traj, threshold);

    wke::OutputWriter writer(g.out_dir);
    wke::RunManifest manifest;
    manifest.config_echo = {{"amplitude", amplitude}, {"b_cut", b_cut},
                            {"omega_min", omega_min}, {"omega_max", omega_max},
                            {"atom_count", atom_count}, {"t_end", t_end},
                            {"threshold", threshold}, {"dt_max", opt.dt_max}};
    manifest.derived_constants = {{"initial_mass", st.total_mass()},
                                  {"initial_energy", st.total_energy()},
                                  {"condensation_time", t_star}};
    manifest.outputs.push_back(writer.write_csv("nonlinear_trajectory", traj_csv));
    manifest.outputs.push_back(writer.write_csv("nonlinear_atoms", atoms_csv));
    finish(writer, manifest, g);
    return 0;
}

// --- experiment condensation-scaling ----------------------------------------

int cmd_condensation_scaling(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"amplitudes", "b_cut", "omega_min", "omega_max", "atom_count", "horizon",
            "threshold"});
    const std::vector<double> amplitudes =
        cfg_get(cfg, "amplitudes", std::vector<double>{1.0, 2.0, 4.0, 8.0});
    const double b_cut = cfg_get(cfg, "b_cut", 1.0);
    const double omega_min = cfg_get(cfg, "omega_min", 1e-4);
    const double omega_max = cfg_get(cfg, "omega_max", 1e2);
    const std::size_t atom_count = cfg_get<std::size_t>(cfg, "atom_count", 96);
    const double horizon = cfg_get(cfg, "horizon", 2000.0);
    const double threshold = cfg_get(cfg, "threshold", 1e-3);
    if (amplitudes.size() < 4)
        throw wke::config_error("condensation-scaling: need at least 4 amplitudes");

    const std::vector<double> grid = wke::geometric_grid(omega_min, omega_max, atom_count);
    const wke::ScalingResult res =
        wke::scaling_experiment(amplitudes, grid, horizon, threshold, b_cut);

    wke::CsvTable csv;
    csv.header = {"amplitude", "t_star", "t_star_tenth_threshold"};
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
        csv.rows.push_back({amplitudes[i], res.t_star[i], res.t_star_sensitive[i]});

    wke::OutputWriter writer(g.out_dir);
    wke::RunManifest manifest;
    manifest.config_echo = {{"amplitudes", amplitudes}, {"b_cut", b_cut},
                            {"omega_min", omega_min}, {"omega_max", omega_max},
                            {"atom_count", atom_count}, {"horizon", horizon},
                            {"threshold", threshold}};
    manifest.derived_constants = {{"slope", res.slope}, {"complete", res.complete}};
    manifest.outputs.push_back(writer.write_csv("condensation_scaling", csv));
    finish(writer, manifest, g);
    return res.complete ? 0 : 4;
}

// --- acceptance ---------------------------------------------------------------

int cmd_acceptance(const GlobalOpts& g) {
    load_config(g, {});  // no configurable knobs; still validates the file
    const std::vector<wke::CriterionResult> results = wke::run_acceptance();
    wke::CsvTable csv;
    csv.header = {"criterion", "pass", "measured", "target", "tolerance"};
    json detail = json::array();
    int passed = 0;
    for (const auto& r : results) {
        std::printf("%s\n", r.summary_line().c_str());
        csv.rows.push_back({static_cast<double>(r.index), r.pass ? 1.0 : 0.0, r.measured,
                            r.target, r.tolerance});
        json jr{{"index", r.index}, {"name", r.name}, {"pass", r.pass},
                {"measured", r.measured}, {"target", r.target}, {"tolerance", r.tolerance},
                {"detail", r.detail}};
        for (const auto& [k, v] : r.metrics) jr["metrics"][k] = v;
        detail.push_back(std::move(jr));
        if (r.pass) ++passed;
    }
    std::printf("%d/%zu criteria passed\n", passed, results.size());

    wke::OutputWriter writer(g.out_dir);
    wke::RunManifest manifest;
    manifest.config_echo = json::object();
    const wke::SpectralContext ctx = wke::calibrate_gamma();
    manifest.derived_constants = {
        {"gamma", ctx.gamma},
        {"gamma_N", ctx.gamma_N},
        {"omega_3i4", ctx.omega_mellin({0.0, 0.75}).real()},
        {"nu", -ctx.omega_mellin({0.0, 0.75}).real()},
        {"wsecond_3half", wke::w_derivative(ctx, {1.5, 0.0}, 2).real()},
        {"k_norm_1", wke::k_norm(1.0)},
        {"criteria_passed", passed}};
    manifest.outputs.push_back(writer.write_csv("acceptance_results", csv));
    manifest.outputs.push_back(writer.write_json("acceptance_detail", detail));
    finish(writer, manifest, g);
    return 0;  // criterion failures are data, not process failures
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wave-kinetic numerical toolkit"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON configuration file");
    app.add_option("--out", g.out_dir, "output directory (default: out)");
    app.add_flag("--serial", g.serial, "force serial execution (always on)");
    app.add_flag("--verbose", g.verbose, "log artifact paths and checksums to stderr");

    auto* kernel_table = app.add_subcommand("kernel-table", "tabulate K, K' and the tail envelope");
    auto* spectral_scan = app.add_subcommand("spectral-scan", "scan Omega along a horizontal line");
    auto* linear_evolve = app.add_subcommand("linear-evolve", "propagate the linearized equation");
    auto* nonlinear_evolve =
        app.add_subcommand("nonlinear-evolve", "evolve the measure-valued nonlinear equation");
    auto* experiment = app.add_subcommand("experiment", "named experiments");
    auto* scaling = experiment->add_subcommand("condensation-scaling",
                                               "condensation-time scaling in the amplitude");
    experiment->require_subcommand(1);
    auto* acceptance = app.add_subcommand("acceptance", "run the acceptance suite");

    try {
        app.parse(argc, argv);
        if (kernel_table->parsed()) return cmd_kernel_table(g);
        if (spectral_scan->parsed()) return cmd_spectral_scan(g);
        if (linear_evolve->parsed()) return cmd_linear_evolve(g);
        if (nonlinear_evolve->parsed()) return cmd_nonlinear_evolve(g);
        if (experiment->parsed() && scaling->parsed()) return cmd_condensation_scaling(g);
        if (acceptance->parsed()) return cmd_acceptance(g);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const wke::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const wke::precondition_error& e) {
        std::fprintf(stderr, "precondition error: %s\n", e.what());
        return 3;
    } catch (const wke::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

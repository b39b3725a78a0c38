// vgate command-line interface: figure-reproduction tables and protocol
// scripts from the vgate library. One JSON config plus flag overrides; flags
// win. Every command is deterministic given (config, seed): reruns produce
// byte-identical output files.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vgate/errors.hpp"
#include "vgate/instanton.hpp"
#include "vgate/io.hpp"
#include "vgate/majorana.hpp"
#include "vgate/params.hpp"
#include "vgate/potential.hpp"
#include "vgate/protocol.hpp"
#include "vgate/rng.hpp"
#include "vgate/spectral.hpp"

namespace {

using vgate::ojson;

double parse_angle(const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s += c;
    if (s.empty()) throw vgate::ConfigError("empty angle expression");
    double sign = 1.0;
    if (s[0] == '-') {
        sign = -1.0;
        s = s.substr(1);
    }
    auto to_double = [](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw vgate::ConfigError("cannot parse angle component '" + t + "'");
        }
        if (used != t.size())
            throw vgate::ConfigError("trailing characters in angle '" + t + "'");
        return v;
    };
    const auto star = s.find("*pi");
    const auto bare = s.find("pi");
    double value = 0.0;
    if (star != std::string::npos) {
        // NUM*pi or NUM*pi/DEN
        const double num = to_double(s.substr(0, star));
        std::string rest = s.substr(star + 3);
        double den = 1.0;
        if (!rest.empty()) {
            if (rest[0] != '/')
                throw vgate::ConfigError("bad angle expression '" + text + "'");
            den = to_double(rest.substr(1));
        }
        value = num * vgate::pi / den;
    } else if (bare == 0) {
        // pi or pi/DEN
        std::string rest = s.substr(2);
        double den = 1.0;
        if (!rest.empty()) {
            if (rest[0] != '/')
                throw vgate::ConfigError("bad angle expression '" + text + "'");
            den = to_double(rest.substr(1));
        }
        value = vgate::pi / den;
    } else {
        value = to_double(s);
    }
    return sign * value;
}

std::string fmt_flux_tag(double flux_over_pi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", flux_over_pi);
    return buf;
}

// Pull `key` from a JSON section if present; a flag the user passed wins
// (its value is already in the slot after parse, so JSON must not override).
template <typename T>
void merge(const ojson* section, const char* key, const CLI::Option* opt, T& slot) {
    if (opt != nullptr && opt->count() > 0) return;
    if (section != nullptr && section->contains(key))
        slot = section->at(key).get<T>();
}

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 20260801ull;
    int threads = 1;
    ojson config; // parsed --config file ({} when absent)

    const ojson* section(const char* name) const {
        if (config.contains(name) && config.at(name).is_object())
            return &config.at(name);
        return nullptr;
    }
};

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw vgate::ConfigError("grid count must be >= 1");
    std::vector<double> g;
    if (count == 1) {
        g.push_back(lo);
        return g;
    }
    for (int i = 0; i < count; ++i)
        g.push_back(lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(count - 1));
    return g;
}

std::string fmt_params(const vgate::CircuitParams& p) {
    return "epsilon=" + vgate::fmt_g17(p.epsilon()) +
           " alpha=" + vgate::fmt_g17(p.alpha()) +
           " e_c=" + vgate::fmt_g17(p.e_c) +
           " q_plus_2e=" + vgate::fmt_g17(p.q_gate_1 + p.q_gate_2) +
           " q_minus_2e=" + vgate::fmt_g17(p.q_gate_1 - p.q_gate_2);
}

// ---------------------------------------------------------------------------
// potential: landscape slices for the figure-reproduction CSVs.

struct PotentialArgs {
    double epsilon = 0.1;
    double alpha = 2.0;
    std::vector<double> flux_over_pi = {0.0, 0.5, 1.0, 1.5};
    int points = 512;
    int phi_bar_resolution = 256;
};

int cmd_potential(const Common& common, const PotentialArgs& args) {
    vgate::CircuitParams p = vgate::CircuitParams::from_asymmetry(
        args.epsilon, args.alpha, 0.4, 0.25, 0.0);
    p.validate();
    if (args.points < 2 || args.phi_bar_resolution < 8)
        throw vgate::ConfigError("potential needs points >= 2 and "
                                 "phi_bar_resolution >= 8");
    const std::vector<double> grid = vgate::default_delta_phi_grid(args.points);
    for (double f : args.flux_over_pi) {
        const double flux = f * vgate::pi;
        auto slice = vgate::landscape_slice(p, flux, grid,
                                            args.phi_bar_resolution,
                                            common.threads);
        vgate::CsvTable table;
        table.prov.command = "potential";
        table.prov.params = {
            {"params", fmt_params(p)},
            {"flux_rad", vgate::fmt_g17(flux)},
            {"phi_bar_resolution", std::to_string(args.phi_bar_resolution)},
        };
        table.columns = {"delta_phi_rad", "energy_over_J"};
        for (const auto& [dphi, energy] : slice)
            table.rows.push_back({dphi, energy});
        const std::string path = common.out_dir + "/potential_flux_" +
                                 fmt_flux_tag(f) + "pi.csv";
        table.write(path);
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// phase-sweep: numeric Berry phase vs epsilon alongside the closed-form
// prediction.

struct PhaseSweepArgs {
    double eps_min = 0.0;
    double eps_max = 0.08;
    int eps_count = 9;
    double alpha = 2.0;
    double e_c = 0.4;
    double q_plus = 0.25;
    double q_minus = 0.0;
    int n_cutoff = 8;
    int grid_points = 384;
    bool refine = true;
};

int cmd_phase_sweep(const Common& common, const PhaseSweepArgs& args) {
    vgate::CircuitParams tmpl = vgate::CircuitParams::from_asymmetry(
        0.0, args.alpha, args.e_c, args.q_plus, args.q_minus);
    tmpl.validate();
    vgate::ChargeBasisSpec spec;
    spec.n_cutoff = args.n_cutoff;
    spec.validate();
    vgate::SweepConfig sweep;
    sweep.n_uniform = args.grid_points;
    sweep.refine = args.refine;
    sweep.validate();
    vgate::SolveOptions opt;
    opt.n_threads = common.threads;

    const std::vector<double> eps_grid =
        linspace(args.eps_min, args.eps_max, args.eps_count);
    const auto rows =
        vgate::phase_vs_epsilon_sweep(tmpl, eps_grid, sweep, spec,
                                      vgate::FluxGauge::on_j2, opt);

    vgate::CsvTable table;
    table.prov.command = "phase-sweep";
    table.prov.params = {
        {"params", fmt_params(tmpl)},
        {"n_cutoff", std::to_string(spec.n_cutoff)},
        {"grid_points", std::to_string(sweep.n_uniform)},
    };
    table.columns = {"epsilon", "q_plus_2e", "q_minus_2e", "phase_rad"};
    for (const auto& row : rows)
        table.rows.push_back(
            {row.epsilon, args.q_plus, args.q_minus, row.phase});
    const std::string csv_path = common.out_dir + "/phase_sweep.csv";
    table.write(csv_path);

    ojson report;
    report["tool"] = std::string("vgate ") + vgate::version;
    report["command"] = "phase-sweep";
    report["params"] = ojson{{"alpha", args.alpha},
                             {"e_c", args.e_c},
                             {"q_plus_2e", args.q_plus},
                             {"q_minus_2e", args.q_minus},
                             {"n_cutoff", spec.n_cutoff},
                             {"grid_points", sweep.n_uniform},
                             {"refine", sweep.refine}};
    double min_overlap = 1.0;
    report["points"] = ojson::array();
    for (const auto& row : rows) {
        vgate::CircuitParams p = vgate::CircuitParams::from_asymmetry(
            row.epsilon, args.alpha, args.e_c, args.q_plus, args.q_minus);
        const vgate::InstantonPrediction pred = vgate::predict(p);
        const double deviation =
            pred.gate_phase_2theta == 0.0
                ? 0.0
                : std::abs(row.phase - pred.gate_phase_2theta) /
                      std::abs(pred.gate_phase_2theta);
        min_overlap = std::min(min_overlap, row.min_overlap);
        report["points"].push_back(
            ojson{{"epsilon", row.epsilon},
                  {"numeric_phase_rad", row.phase},
                  {"instanton_phase_rad", pred.gate_phase_2theta},
                  {"relative_deviation", deviation},
                  {"instanton_d", pred.d},
                  {"out_of_regime", pred.out_of_regime},
                  {"min_overlap", row.min_overlap}});
    }
    report["min_overlap"] = min_overlap;
    const std::string json_path = common.out_dir + "/phase_sweep.json";
    vgate::write_json(json_path, report);
    std::cout << "wrote " << csv_path << "\nwrote " << json_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// dynamic-range: zeta tables over an epsilon grid and a gate-charge grid,
// plus the resonance location (argmax of zeta over the gate-charge scan).

struct DynamicRangeArgs {
    double eps_min = 0.01;
    double eps_max = 0.08;
    int eps_count = 8;
    double q_plus = 0.25;
    double q_minus = 0.0;
    double eps_for_q_scan = 0.05;
    double q_plus_min = 0.10;
    double q_plus_max = 0.30;
    int q_plus_count = 11;
    double alpha = 2.0;
    double e_c = 0.4;
    int n_cutoff = 8;
    int grid_points = 384;
    bool refine = true;
};

int cmd_dynamic_range(const Common& common, const DynamicRangeArgs& args) {
    vgate::ChargeBasisSpec spec;
    spec.n_cutoff = args.n_cutoff;
    spec.validate();
    vgate::SweepConfig sweep;
    sweep.n_uniform = args.grid_points;
    sweep.refine = args.refine;
    sweep.validate();
    vgate::SolveOptions opt;
    opt.n_threads = common.threads;

    const auto zeta_at = [&](double eps, double q_plus) {
        vgate::CircuitParams p = vgate::CircuitParams::from_asymmetry(
            eps, args.alpha, args.e_c, q_plus, args.q_minus);
        p.validate();
        return vgate::dynamical_range(p, sweep, spec, vgate::FluxGauge::on_j2,
                                      opt);
    };

    vgate::CsvTable eps_table;
    eps_table.prov.command = "dynamic-range";
    eps_table.prov.params = {
        {"scan", "epsilon"},
        {"alpha", vgate::fmt_g17(args.alpha)},
        {"e_c", vgate::fmt_g17(args.e_c)},
        {"q_plus_2e", vgate::fmt_g17(args.q_plus)},
        {"q_minus_2e", vgate::fmt_g17(args.q_minus)},
        {"n_cutoff", std::to_string(spec.n_cutoff)},
        {"grid_points", std::to_string(sweep.n_uniform)},
    };
    eps_table.columns = {"epsilon", "q_plus_2e", "q_minus_2e", "zeta"};
    for (double eps : linspace(args.eps_min, args.eps_max, args.eps_count)) {
        const auto dr = zeta_at(eps, args.q_plus);
        eps_table.rows.push_back({eps, args.q_plus, args.q_minus, dr.zeta});
    }
    const std::string eps_path =
        common.out_dir + "/dynamic_range_epsilon.csv";
    eps_table.write(eps_path);

    vgate::CsvTable q_table;
    q_table.prov.command = "dynamic-range";
    q_table.prov.params = {
        {"scan", "q_plus"},
        {"alpha", vgate::fmt_g17(args.alpha)},
        {"e_c", vgate::fmt_g17(args.e_c)},
        {"epsilon", vgate::fmt_g17(args.eps_for_q_scan)},
        {"q_minus_2e", vgate::fmt_g17(args.q_minus)},
        {"n_cutoff", std::to_string(spec.n_cutoff)},
        {"grid_points", std::to_string(sweep.n_uniform)},
    };
    q_table.columns = eps_table.columns;
    double best_q = args.q_plus_min;
    double best_zeta = -1.0;
    for (double q :
         linspace(args.q_plus_min, args.q_plus_max, args.q_plus_count)) {
        const auto dr = zeta_at(args.eps_for_q_scan, q);
        q_table.rows.push_back({args.eps_for_q_scan, q, args.q_minus, dr.zeta});
        if (dr.zeta > best_zeta) {
            best_zeta = dr.zeta;
            best_q = q;
        }
    }
    const std::string q_path = common.out_dir + "/dynamic_range_qplus.csv";
    q_table.write(q_path);

    // Resonance location: argmax of zeta over the gate-charge scan.
    vgate::CsvTable res_table;
    res_table.prov.command = "dynamic-range";
    res_table.prov.params = {
        {"scan", "resonance"},
        {"alpha", vgate::fmt_g17(args.alpha)},
        {"e_c", vgate::fmt_g17(args.e_c)},
        {"n_cutoff", std::to_string(spec.n_cutoff)},
        {"grid_points", std::to_string(sweep.n_uniform)},
    };
    res_table.columns = {"epsilon", "resonance_q_plus_2e", "zeta_peak"};
    res_table.rows.push_back({args.eps_for_q_scan, best_q, best_zeta});
    const std::string res_path =
        common.out_dir + "/dynamic_range_resonance.csv";
    res_table.write(res_path);

    std::cout << "wrote " << eps_path << "\nwrote " << q_path << "\nwrote "
              << res_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// chsh: exact and sampled CHSH vs theta, Clifford ceiling search, optional
// end-to-end theta from the circuit's Berry phase.

struct ChshArgs {
    int theta_count = 33;
    double theta_max_over_pi = 0.5;
    long shots = 4096;
    bool clifford_only = false;
    int trials = 1000;
    bool theta_from_circuit = false;
    double epsilon = 0.05;
    double alpha = 2.0;
    double e_c = 0.4;
    double q_plus = 0.25;
    double q_minus = 0.0;
    int n_cutoff = 8;
    int grid_points = 384;
};

int cmd_chsh(const Common& common, const ChshArgs& args) {
    const vgate::MajoranaAlgebra alg = vgate::build_algebra();
    ojson report;
    report["tool"] = std::string("vgate ") + vgate::version;
    report["command"] = "chsh";
    report["seed"] = common.seed;

    if (args.clifford_only) {
        if (args.trials < 1) throw vgate::ConfigError("trials must be >= 1");
        const double ceiling =
            vgate::clifford_ceiling_search(alg, args.trials, common.seed, false);
        report["clifford_only"] = ojson{{"n_trials", args.trials},
                                        {"max_value", ceiling},
                                        {"bound", 2.0}};
        const std::string path = common.out_dir + "/chsh.json";
        vgate::write_json(path, report);
        std::cout << "wrote " << path << "\n";
        return 0;
    }

    if (args.theta_count < 2 || args.shots < 4)
        throw vgate::ConfigError("chsh needs theta_count >= 2 and shots >= 4");
    report["shots_per_theta"] = args.shots;
    report["curve"] = ojson::array();
    double max_exact = -10.0;
    double argmax_theta = 0.0;
    for (int i = 0; i < args.theta_count; ++i) {
        const double theta = args.theta_max_over_pi * vgate::pi *
                             static_cast<double>(i) /
                             static_cast<double>(args.theta_count - 1);
        vgate::MajoranaRegister reg = vgate::make_register(alg, +1);
        std::mt19937_64 rng =
            vgate::seeded_engine(vgate::subseed(common.seed, 2 * i));
        vgate::prepare_bell(alg, reg, rng);
        vgate::MajoranaRegister bell = reg;
        vgate::phase_gate(alg, reg, theta, vgate::Qubit::lower, vgate::Axis::y);
        const double exact = vgate::chsh_value(alg, reg);
        const vgate::SampledChsh sampled = vgate::chsh_sampled(
            alg, bell, theta, args.shots, vgate::subseed(common.seed, 2 * i + 1));
        if (exact > max_exact) {
            max_exact = exact;
            argmax_theta = theta;
        }
        report["curve"].push_back(
            ojson{{"theta_rad", theta},
                  {"exact", exact},
                  {"formula", vgate::chsh_predicted(theta)},
                  {"sampled", sampled.estimate},
                  {"sampled_stderr", sampled.standard_error}});
    }
    report["max_exact"] = max_exact;
    report["argmax_theta_rad"] = argmax_theta;

    if (args.theta_from_circuit) {
        vgate::CircuitParams p = vgate::CircuitParams::from_asymmetry(
            args.epsilon, args.alpha, args.e_c, args.q_plus, args.q_minus);
        p.validate();
        vgate::ChargeBasisSpec spec;
        spec.n_cutoff = args.n_cutoff;
        spec.validate();
        vgate::SweepConfig sweep;
        sweep.n_uniform = args.grid_points;
        sweep.validate();
        vgate::SolveOptions opt;
        opt.n_threads = common.threads;
        const vgate::QubitPhaseReport qp =
            vgate::qubit_phase_report(p, sweep, spec, vgate::FluxGauge::on_j2, opt);
        const double theta = 0.5 * qp.phase;
        vgate::MajoranaRegister reg = vgate::make_register(alg, +1);
        std::mt19937_64 rng =
            vgate::seeded_engine(vgate::subseed(common.seed, 0xC1C1ull));
        vgate::prepare_bell(alg, reg, rng);
        vgate::phase_gate(alg, reg, theta, vgate::Qubit::lower, vgate::Axis::y);
        report["theta_from_circuit"] =
            ojson{{"epsilon", args.epsilon},
                  {"qubit_phase_rad", qp.phase},
                  {"theta_rad", theta},
                  {"min_overlap", qp.min_overlap},
                  {"exact_chsh", vgate::chsh_value(alg, reg)},
                  {"formula_chsh", vgate::chsh_predicted(theta)}};
    }

    const std::string path = common.out_dir + "/chsh.json";
    vgate::write_json(path, report);
    std::cout << "wrote " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// protocol: measurement-configuration compiler and the full CHSH script.

struct ProtocolArgs {
    std::string fixture;
    std::string target;
    std::string pauli;
    std::string theta;
};

int cmd_protocol(const Common& common, const ProtocolArgs& args) {
    if (args.fixture.empty())
        throw vgate::ConfigError("protocol requires --fixture <device.json>");
    const int n_modes = (args.target.empty() ? 0 : 1) +
                        (args.pauli.empty() ? 0 : 1) +
                        (args.theta.empty() ? 0 : 1);
    if (n_modes != 1)
        throw vgate::ConfigError(
            "protocol requires exactly one of --target, --pauli, --theta");
    const vgate::DeviceGraph device =
        vgate::DeviceGraph::from_json(vgate::read_json_file(args.fixture));

    std::string path;
    if (!args.target.empty()) {
        const vgate::MeasurementConfig cfg =
            vgate::compile_named_target(device, args.target);
        path = common.out_dir + "/protocol_" + args.target + ".json";
        vgate::write_json(path,
                          vgate::measurement_report(device, args.target, cfg));
    } else if (!args.pauli.empty()) {
        const vgate::MeasurementConfig cfg =
            vgate::compile_pauli_product(device, args.pauli);
        path = common.out_dir + "/protocol_pauli_" + args.pauli + ".json";
        vgate::write_json(path,
                          vgate::measurement_report(device, args.pauli, cfg));
    } else {
        const double theta = parse_angle(args.theta);
        ojson script;
        script["tool"] = std::string("vgate ") + vgate::version;
        script["command"] = "protocol";
        script["device"] = device.name;
        script["theta_rad"] = theta;
        script["steps"] = vgate::chsh_script(device, theta);
        path = common.out_dir + "/chsh_script.json";
        vgate::write_json(path, script);
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vgate: Josephson-vortex phase gate simulation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    auto* opt_config =
        app.add_option("--config", common.config_path, "JSON config file");
    auto* opt_out = app.add_option("--out", common.out_dir,
                                   "output directory (default .)");
    auto* opt_seed = app.add_option("--seed", common.seed, "RNG seed");
    auto* opt_threads =
        app.add_option("--threads", common.threads, "worker thread count");

    PotentialArgs pot;
    auto* sub_pot = app.add_subcommand(
        "potential", "landscape slices min over phi_bar of V(delta_phi)");
    auto* pot_eps = sub_pot->add_option("--epsilon", pot.epsilon,
                                        "junction asymmetry (default 0.1)");
    auto* pot_alpha =
        sub_pot->add_option("--alpha", pot.alpha, "j3 / J (default 2)");
    auto* pot_flux = sub_pot->add_option(
        "--flux-over-pi", pot.flux_over_pi,
        "flux values in units of pi (default 0 0.5 1 1.5)");
    auto* pot_points =
        sub_pot->add_option("--points", pot.points, "delta_phi grid size");
    auto* pot_res = sub_pot->add_option("--phi-bar-res", pot.phi_bar_resolution,
                                        "phi_bar minimization resolution");

    PhaseSweepArgs ps;
    auto* sub_ps = app.add_subcommand(
        "phase-sweep", "numeric qubit phase vs epsilon + closed-form");
    auto* ps_emin = sub_ps->add_option("--eps-min", ps.eps_min, "grid start");
    auto* ps_emax = sub_ps->add_option("--eps-max", ps.eps_max, "grid end");
    auto* ps_ecount = sub_ps->add_option("--eps-count", ps.eps_count, "points");
    auto* ps_alpha = sub_ps->add_option("--alpha", ps.alpha, "j3 / J");
    auto* ps_ec = sub_ps->add_option("--ec", ps.e_c, "charging energy / J");
    auto* ps_qp = sub_ps->add_option("--qplus", ps.q_plus, "Q1+Q2 (2e units)");
    auto* ps_qm = sub_ps->add_option("--qminus", ps.q_minus, "Q1-Q2");
    auto* ps_nc = sub_ps->add_option("--cutoff", ps.n_cutoff, "charge cutoff");
    auto* ps_grid =
        sub_ps->add_option("--grid-points", ps.grid_points, "flux grid size");
    auto* ps_refine =
        sub_ps->add_flag("--refine,!--no-refine", ps.refine,
                         "refine the flux grid near flux = pi");

    DynamicRangeArgs dr;
    auto* sub_dr = app.add_subcommand(
        "dynamic-range", "zeta = min gap / max splitting tables");
    auto* dr_emin = sub_dr->add_option("--eps-min", dr.eps_min, "grid start");
    auto* dr_emax = sub_dr->add_option("--eps-max", dr.eps_max, "grid end");
    auto* dr_ecount = sub_dr->add_option("--eps-count", dr.eps_count, "points");
    auto* dr_qp =
        sub_dr->add_option("--qplus", dr.q_plus, "Q1+Q2 for the epsilon scan");
    auto* dr_qm = sub_dr->add_option("--qminus", dr.q_minus, "Q1-Q2");
    auto* dr_eq = sub_dr->add_option("--eps-for-qscan", dr.eps_for_q_scan,
                                     "epsilon for the gate-charge scan");
    auto* dr_qmin = sub_dr->add_option("--qplus-min", dr.q_plus_min, "start");
    auto* dr_qmax = sub_dr->add_option("--qplus-max", dr.q_plus_max, "end");
    auto* dr_qcount =
        sub_dr->add_option("--qplus-count", dr.q_plus_count, "points");
    auto* dr_alpha = sub_dr->add_option("--alpha", dr.alpha, "j3 / J");
    auto* dr_ec = sub_dr->add_option("--ec", dr.e_c, "charging energy / J");
    auto* dr_nc = sub_dr->add_option("--cutoff", dr.n_cutoff, "charge cutoff");
    auto* dr_grid =
        sub_dr->add_option("--grid-points", dr.grid_points, "flux grid size");
    auto* dr_refine =
        sub_dr->add_flag("--refine,!--no-refine", dr.refine,
                         "refine the flux grid near flux = pi");

    ChshArgs ch;
    auto* sub_ch =
        app.add_subcommand("chsh", "exact + sampled CHSH curves vs theta");
    auto* ch_tc =
        sub_ch->add_option("--theta-count", ch.theta_count, "curve points");
    auto* ch_tm = sub_ch->add_option("--theta-max-over-pi", ch.theta_max_over_pi,
                                     "curve end in units of pi");
    auto* ch_shots = sub_ch->add_option("--shots", ch.shots,
                                        "total shots per theta point");
    auto* ch_cliff = sub_ch->add_flag("--clifford-only", ch.clifford_only,
                                      "Clifford ceiling search only");
    auto* ch_trials =
        sub_ch->add_option("--trials", ch.trials, "ceiling-search trials");
    auto* ch_tfc = sub_ch->add_flag(
        "--theta-from-circuit", ch.theta_from_circuit,
        "derive theta from the circuit Berry phase (end-to-end)");
    auto* ch_eps = sub_ch->add_option("--epsilon", ch.epsilon,
                                      "asymmetry for --theta-from-circuit");
    auto* ch_alpha = sub_ch->add_option("--alpha", ch.alpha, "j3 / J");
    auto* ch_ec = sub_ch->add_option("--ec", ch.e_c, "charging energy / J");
    auto* ch_qp = sub_ch->add_option("--qplus", ch.q_plus, "Q1+Q2");
    auto* ch_qm = sub_ch->add_option("--qminus", ch.q_minus, "Q1-Q2");
    auto* ch_nc = sub_ch->add_option("--cutoff", ch.n_cutoff, "charge cutoff");
    auto* ch_grid =
        sub_ch->add_option("--grid-points", ch.grid_points, "flux grid size");

    ProtocolArgs pr;
    auto* sub_pr = app.add_subcommand(
        "protocol", "compile measurement configs / emit CHSH script");
    auto* pr_fix = sub_pr->add_option("--fixture", pr.fixture,
                                      "device fixture JSON (required)");
    auto* pr_target = sub_pr->add_option(
        "--target", pr.target,
        "named target: tare init1 init2 upperX upperZ lowerx lowerz");
    auto* pr_pauli =
        sub_pr->add_option("--pauli", pr.pauli, "Pauli word, e.g. XIZ");
    auto* pr_theta = sub_pr->add_option(
        "--theta", pr.theta, "gate angle (e.g. pi/8) for the full CHSH script");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        // JSON config fills anything the user did not pass as a flag.
        if (!common.config_path.empty())
            common.config = vgate::read_json_file(common.config_path);
        else
            common.config = ojson::object();
        (void)opt_config;
        if (common.config.contains("out") && opt_out->count() == 0)
            common.out_dir = common.config.at("out").get<std::string>();
        if (common.config.contains("seed") && opt_seed->count() == 0)
            common.seed = common.config.at("seed").get<std::uint64_t>();
        if (common.config.contains("threads") && opt_threads->count() == 0)
            common.threads = common.config.at("threads").get<int>();
        if (common.threads < 1)
            throw vgate::ConfigError("threads must be >= 1");

        if (sub_pot->parsed()) {
            const ojson* sec = common.section("potential");
            merge(sec, "epsilon", pot_eps, pot.epsilon);
            merge(sec, "alpha", pot_alpha, pot.alpha);
            merge(sec, "flux_over_pi", pot_flux, pot.flux_over_pi);
            merge(sec, "points", pot_points, pot.points);
            merge(sec, "phi_bar_resolution", pot_res, pot.phi_bar_resolution);
            return cmd_potential(common, pot);
        }
        if (sub_ps->parsed()) {
            const ojson* sec = common.section("phase_sweep");
            merge(sec, "eps_min", ps_emin, ps.eps_min);
            merge(sec, "eps_max", ps_emax, ps.eps_max);
            merge(sec, "eps_count", ps_ecount, ps.eps_count);
            merge(sec, "alpha", ps_alpha, ps.alpha);
            merge(sec, "e_c", ps_ec, ps.e_c);
            merge(sec, "q_plus", ps_qp, ps.q_plus);
            merge(sec, "q_minus", ps_qm, ps.q_minus);
            merge(sec, "n_cutoff", ps_nc, ps.n_cutoff);
            merge(sec, "grid_points", ps_grid, ps.grid_points);
            merge(sec, "refine", ps_refine, ps.refine);
            return cmd_phase_sweep(common, ps);
        }
        if (sub_dr->parsed()) {
            const ojson* sec = common.section("dynamic_range");
            merge(sec, "eps_min", dr_emin, dr.eps_min);
            merge(sec, "eps_max", dr_emax, dr.eps_max);
            merge(sec, "eps_count", dr_ecount, dr.eps_count);
            merge(sec, "q_plus", dr_qp, dr.q_plus);
            merge(sec, "q_minus", dr_qm, dr.q_minus);
            merge(sec, "eps_for_q_scan", dr_eq, dr.eps_for_q_scan);
            merge(sec, "q_plus_min", dr_qmin, dr.q_plus_min);
            merge(sec, "q_plus_max", dr_qmax, dr.q_plus_max);
            merge(sec, "q_plus_count", dr_qcount, dr.q_plus_count);
            merge(sec, "alpha", dr_alpha, dr.alpha);
            merge(sec, "e_c", dr_ec, dr.e_c);
            merge(sec, "n_cutoff", dr_nc, dr.n_cutoff);
            merge(sec, "grid_points", dr_grid, dr.grid_points);
            merge(sec, "refine", dr_refine, dr.refine);
            return cmd_dynamic_range(common, dr);
        }
        if (sub_ch->parsed()) {
            const ojson* sec = common.section("chsh");
            merge(sec, "theta_count", ch_tc, ch.theta_count);
            merge(sec, "theta_max_over_pi", ch_tm, ch.theta_max_over_pi);
            merge(sec, "shots", ch_shots, ch.shots);
            merge(sec, "clifford_only", ch_cliff, ch.clifford_only);
            merge(sec, "trials", ch_trials, ch.trials);
            merge(sec, "theta_from_circuit", ch_tfc, ch.theta_from_circuit);
            merge(sec, "epsilon", ch_eps, ch.epsilon);
            merge(sec, "alpha", ch_alpha, ch.alpha);
            merge(sec, "e_c", ch_ec, ch.e_c);
            merge(sec, "q_plus", ch_qp, ch.q_plus);
            merge(sec, "q_minus", ch_qm, ch.q_minus);
            merge(sec, "n_cutoff", ch_nc, ch.n_cutoff);
            merge(sec, "grid_points", ch_grid, ch.grid_points);
            return cmd_chsh(common, ch);
        }
        if (sub_pr->parsed()) {
            const ojson* sec = common.section("protocol");
            merge(sec, "fixture", pr_fix, pr.fixture);
            merge(sec, "target", pr_target, pr.target);
            merge(sec, "pauli", pr_pauli, pr.pauli);
            merge(sec, "theta", pr_theta, pr.theta);
            return cmd_protocol(common, pr);
        }
        throw vgate::ConfigError("no subcommand selected");
    } catch (const vgate::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

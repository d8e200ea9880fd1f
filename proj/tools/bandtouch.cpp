// bandtouch - driven two-level band-touching simulator CLI.
//
// Subcommands map one-to-one onto the library workflows: `fis` samples the
// fidelity susceptibility over a lambda range, `evolve` integrates a single
// driving protocol, `phase` runs the split-evolution decomposition, `sweep`
// scans a parameter axis, and `oracle-check` cross-validates the
// Crank-Nicolson integrator against the RK4 oracle.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bandtouch/dynamics.hpp"
#include "bandtouch/fis.hpp"
#include "bandtouch/io.hpp"
#include "bandtouch/sweep.hpp"

namespace {

using namespace bandtouch;

struct ModelFlags {
    std::string model;
    std::string config;
    int n = 1;
    double delta1 = 0.5;
    double delta2 = 0.5;
    double m = 1.0;
    double delta_re = 1.0;
    double delta_im = 0.0;
    double hopping = 1.0;
    double lattice = 1.0;
    std::vector<double> coeffs;
};

struct ProtocolFlags {
    std::string protocol = "pl2";
    double c = 1.0;
    double dt = 1e-3;
    double lambda_inf = 10.0;
    double epsilon = 1e-6;
    double lambda0 = 0.1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--model", f.model,
                    "model family: gl|gp|pw|graphene_quadratic|graphene_tb|poly");
    cmd->add_option("--config", f.config, "path to a model JSON file");
    cmd->add_option("--n", f.n, "diagonal exponent (gl/gp)");
    cmd->add_option("--delta1", f.delta1, "gl linear coupling");
    cmd->add_option("--delta2", f.delta2, "gp gap coupling");
    cmd->add_option("--m", f.m, "pw mass");
    cmd->add_option("--delta-re", f.delta_re, "pw coupling, real part");
    cmd->add_option("--delta-im", f.delta_im, "pw coupling, imaginary part");
    cmd->add_option("--hopping", f.hopping, "graphene hopping");
    cmd->add_option("--lattice", f.lattice, "graphene lattice constant");
    cmd->add_option("--coeffs", f.coeffs, "poly diagonal coefficients a1,a2,...")
        ->delimiter(',');
}

void add_protocol_flags(CLI::App* cmd, ProtocolFlags& f) {
    cmd->add_option("--protocol", f.protocol, "pl1|pl2|plneg|plpos")
        ->check(CLI::IsMember({"pl1", "pl2", "plneg", "plpos"}));
    cmd->add_option("--c", f.c, "driving speed");
    cmd->add_option("--dt", f.dt, "time step");
    cmd->add_option("--lambda-inf", f.lambda_inf, "numerical infinity");
    cmd->add_option("--epsilon", f.epsilon, "gapless endpoint offset");
    cmd->add_option("--lambda0", f.lambda0, "pl1 half-width");
}

ModelSpec make_model(const ModelFlags& f) {
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) {
            throw std::invalid_argument("--config: cannot open " + f.config);
        }
        return model_from_json(nlohmann::json::parse(in));
    }
    ModelSpec model;
    if (f.model == "gl") {
        model = GL{f.n, f.delta1};
    } else if (f.model == "gp") {
        model = GP{f.n, f.delta2};
    } else if (f.model == "pw") {
        model = PWave{f.m, cplx(f.delta_re, f.delta_im)};
    } else if (f.model == "graphene_quadratic") {
        model = GrapheneQuadratic{f.hopping, f.lattice};
    } else if (f.model == "graphene_tb") {
        model = GrapheneTightBinding{f.hopping, f.lattice};
    } else if (f.model == "poly") {
        model = PolyDiag{f.coeffs, f.delta_re};
    } else {
        throw std::invalid_argument(
            "--model: expected gl|gp|pw|graphene_quadratic|graphene_tb|poly");
    }
    validate(model);
    return model;
}

Protocol make_protocol(const ProtocolFlags& f) {
    Protocol p;
    if (f.protocol == "pl1") {
        p.kind = ProtocolKind::PL1;
    } else if (f.protocol == "pl2") {
        p.kind = ProtocolKind::PL2;
    } else if (f.protocol == "plneg") {
        p.kind = ProtocolKind::PLNeg;
    } else {
        p.kind = ProtocolKind::PLPos;
    }
    p.c = f.c;
    p.dt = f.dt;
    p.lambda_inf = f.lambda_inf;
    p.epsilon = f.epsilon;
    p.lambda0 = f.lambda0;
    p.validate();
    return p;
}

struct Range {
    double min = 0.0;
    double max = 0.0;
    int steps = 0;

    std::vector<double> grid() const {
        std::vector<double> values(steps);
        for (int i = 0; i < steps; ++i) {
            values[i] = min + i * (max - min) / (steps - 1);
        }
        return values;
    }
};

Range parse_range(const std::string& text) {
    Range r;
    char sep1 = 0;
    char sep2 = 0;
    std::istringstream in(text);
    if (!(in >> r.min >> sep1 >> r.max >> sep2 >> r.steps) || sep1 != ':' ||
        sep2 != ':' || r.steps < 2 || !(r.min < r.max)) {
        throw std::invalid_argument("--range: expected min:max:steps with min < max and steps >= 2");
    }
    return r;
}

nlohmann::json protocol_json(const Protocol& p) {
    const char* names[] = {"pl1", "pl2", "plneg", "plpos", "custom"};
    return nlohmann::json{{"protocol", names[static_cast<int>(p.kind)]},
                          {"c", p.c},
                          {"dt", p.dt},
                          {"lambda0", p.lambda0},
                          {"lambda_inf", p.lambda_inf},
                          {"epsilon", p.epsilon}};
}

void log_config(const std::string& subcommand, const nlohmann::json& resolved) {
    nlohmann::json j = resolved;
    j["subcommand"] = subcommand;
    std::cerr << "config: " << j.dump() << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file " + path);
    }
    out << text;
}

std::string gnuplot_fis(const std::string& data) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set xlabel 'lambda'\n"
      << "set ylabel 'chi'\n"
      << "plot '" << data << "' every ::1 using 1:2 with lines title 'chi'\n"
      << "pause -1\n";
    return s.str();
}

std::string gnuplot_sweep(const std::string& data, bool phase) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set xlabel 'axis value'\n"
      << "set ylabel 'P'\n";
    if (phase) {
        s << "set y2label '|dPhi|/2pi'\n"
          << "set y2tics\n"
          << "plot '" << data
          << "' every ::1 using 1:2 with linespoints title 'P', '" << data
          << "' every ::1 using 1:(abs($3)/(2*pi)) axes x1y2 with lines "
             "title '|dPhi|/2pi'\n";
    } else {
        s << "plot '" << data
          << "' every ::1 using 1:2 with linespoints title 'P'\n";
    }
    s << "pause -1\n";
    return s.str();
}

int run(int argc, char** argv) {
    CLI::App app{"driven two-level band-touching simulator"};
    app.require_subcommand(1);

    // fis
    auto* fis_cmd = app.add_subcommand("fis", "sample chi(lambda) over a range");
    ModelFlags fis_model;
    std::string fis_range = "-2:2:401";
    std::string fis_out = "fis.csv";
    std::string fis_format = "csv";
    std::string fis_plot;
    add_model_flags(fis_cmd, fis_model);
    fis_cmd->add_option("--range", fis_range, "lambda range min:max:steps");
    fis_cmd->add_option("--out", fis_out, "output file");
    fis_cmd->add_option("--format", fis_format)->check(CLI::IsMember({"csv", "json"}));
    fis_cmd->add_option("--plot-script", fis_plot, "write a gnuplot script");

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "integrate one driving protocol");
    ModelFlags evolve_model;
    ProtocolFlags evolve_protocol;
    std::string evolve_out;
    int sample_every = 100;
    add_model_flags(evolve_cmd, evolve_model);
    add_protocol_flags(evolve_cmd, evolve_protocol);
    evolve_cmd->add_option("--out", evolve_out, "trajectory CSV file");
    evolve_cmd->add_option("--sample-every", sample_every,
                           "record every k-th step (0: endpoints only)");

    // phase
    auto* phase_cmd = app.add_subcommand("phase", "split-evolution phase decomposition");
    ModelFlags phase_model;
    ProtocolFlags phase_protocol;
    std::string phase_out;
    add_model_flags(phase_cmd, phase_model);
    add_protocol_flags(phase_cmd, phase_protocol);
    phase_cmd->add_option("--out", phase_out, "decomposition JSON file");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep of P (and delta_phi)");
    ModelFlags sweep_model;
    ProtocolFlags sweep_protocol;
    std::string sweep_axis = "delta";
    std::string sweep_range;
    std::string sweep_measure = "p";
    std::string sweep_out = "sweep.csv";
    std::string sweep_format = "csv";
    std::string sweep_plot;
    int threads = 0;
    add_model_flags(sweep_cmd, sweep_model);
    add_protocol_flags(sweep_cmd, sweep_protocol);
    sweep_cmd->add_option("--axis", sweep_axis)
        ->check(CLI::IsMember({"delta", "speed", "exponent"}));
    sweep_cmd->add_option("--range", sweep_range, "axis range min:max:steps")
        ->required();
    sweep_cmd->add_option("--measure", sweep_measure)
        ->check(CLI::IsMember({"p", "p,delta_phi"}));
    sweep_cmd->add_option("--out", sweep_out, "output file");
    sweep_cmd->add_option("--format", sweep_format)
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_option("--plot-script", sweep_plot, "write a gnuplot script");
    sweep_cmd->add_option("--threads", threads, "worker count (0: auto)");

    // oracle-check
    auto* oracle_cmd = app.add_subcommand(
        "oracle-check", "compare Crank-Nicolson against the RK4 oracle");
    ModelFlags oracle_model;
    ProtocolFlags oracle_protocol;
    double dt_oracle = 2e-4;
    add_model_flags(oracle_cmd, oracle_model);
    add_protocol_flags(oracle_cmd, oracle_protocol);
    oracle_cmd->add_option("--dt-oracle", dt_oracle, "oracle time step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (fis_cmd->parsed()) {
        const ModelSpec model = make_model(fis_model);
        const Range range = parse_range(fis_range);
        log_config("fis", {{"model", model_to_json(model)},
                           {"range", fis_range},
                           {"out", fis_out},
                           {"format", fis_format}});
        const FisProfile profile =
            fis_profile(model, range.min, range.max, range.steps);
        if (fis_format == "csv") {
            std::ostringstream s;
            write_csv(profile, s);
            write_text_file(fis_out, s.str());
        } else {
            write_text_file(fis_out, to_json(profile).dump(2) + "\n");
        }
        if (!fis_plot.empty()) {
            write_text_file(fis_plot, gnuplot_fis(fis_out));
        }
        return 0;
    }

    if (evolve_cmd->parsed()) {
        const ModelSpec model = make_model(evolve_model);
        const Protocol protocol = make_protocol(evolve_protocol);
        log_config("evolve", {{"model", model_to_json(model)},
                              {"protocol", protocol_json(protocol)},
                              {"sample_every", sample_every}});
        const Trajectory traj = evolve(model, protocol, sample_every);
        if (!evolve_out.empty()) {
            std::ostringstream s;
            write_csv(traj, s);
            write_text_file(evolve_out, s.str());
        }
        std::cout << "P = " << format_double(transition_probability(traj))
                  << '\n';
        return 0;
    }

    if (phase_cmd->parsed()) {
        const ModelSpec model = make_model(phase_model);
        Protocol protocol = make_protocol(phase_protocol);
        log_config("phase", {{"model", model_to_json(model)},
                             {"protocol", protocol_json(protocol)}});
        const PhaseDecomposition d = split_phase_analysis(model, protocol);
        const std::string text = to_json(d).dump(2) + "\n";
        if (!phase_out.empty()) {
            write_text_file(phase_out, text);
        } else {
            std::cout << text;
        }
        return 0;
    }

    if (sweep_cmd->parsed()) {
        SweepSpec spec;
        spec.model_template = make_model(sweep_model);
        spec.protocol = make_protocol(sweep_protocol);
        spec.axis = sweep_axis == "delta"
                        ? SweepAxis::Delta
                        : (sweep_axis == "speed" ? SweepAxis::Speed
                                                 : SweepAxis::Exponent);
        spec.values = parse_range(sweep_range).grid();
        spec.measure_delta_phi = sweep_measure == "p,delta_phi";
        log_config("sweep",
                   {{"model", model_to_json(spec.model_template)},
                    {"protocol", protocol_json(spec.protocol)},
                    {"axis", sweep_axis},
                    {"range", sweep_range},
                    {"measure", sweep_measure},
                    {"threads", threads},
                    {"out", sweep_out},
                    {"format", sweep_format}});
        const SweepResult result = run_sweep(spec, threads);
        write_table(result, sweep_out,
                    sweep_format == "csv" ? TableFormat::Csv
                                          : TableFormat::Json);
        if (!sweep_plot.empty()) {
            write_text_file(sweep_plot,
                            gnuplot_sweep(sweep_out, spec.measure_delta_phi));
        }
        return 0;
    }

    // oracle-check
    const ModelSpec model = make_model(oracle_model);
    const Protocol protocol = make_protocol(oracle_protocol);
    log_config("oracle-check", {{"model", model_to_json(model)},
                                {"protocol", protocol_json(protocol)},
                                {"dt_oracle", dt_oracle}});
    const double p_cn = transition_probability(evolve(model, protocol));
    const double p_rk4 =
        transition_probability(rk4_oracle_evolve(model, protocol, dt_oracle));
    std::cout << "P_cn = " << format_double(p_cn) << '\n'
              << "P_rk4 = " << format_double(p_rk4) << '\n'
              << "|diff| = " << format_double(std::abs(p_cn - p_rk4)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const bandtouch::DegenerateError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const bandtouch::VanishingAmplitudeError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

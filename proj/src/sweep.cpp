#include "bandtouch/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "bandtouch/io.hpp"

namespace bandtouch {

namespace {

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Delta:
            return "delta";
        case SweepAxis::Speed:
            return "speed";
        case SweepAxis::Exponent:
            return "exponent";
    }
    return "?";
}

ModelSpec with_delta(const ModelSpec& model, double value) {
    ModelSpec out = model;
    if (auto* gl = std::get_if<GL>(&out)) {
        gl->delta1 = value;
    } else if (auto* gp = std::get_if<GP>(&out)) {
        gp->delta2 = value;
    } else if (auto* poly = std::get_if<PolyDiag>(&out)) {
        poly->delta = value;
    } else if (auto* pw = std::get_if<PWave>(&out)) {
        pw->delta = cplx(value, 0.0);
    } else {
        throw std::invalid_argument(
            "sweep: delta axis is not defined for the graphene families");
    }
    return out;
}

ModelSpec with_exponent(const ModelSpec& model, double value) {
    const int n = static_cast<int>(std::lround(value));
    if (std::abs(value - n) > 1e-9) {
        throw std::invalid_argument("sweep: exponent values must be integers");
    }
    ModelSpec out = model;
    if (auto* gl = std::get_if<GL>(&out)) {
        gl->n = n;
    } else if (auto* gp = std::get_if<GP>(&out)) {
        gp->n = n;
    } else {
        throw std::invalid_argument(
            "sweep: exponent axis requires a gl or gp model");
    }
    return out;
}

int resolve_workers(int workers, std::size_t points) {
    int w = workers > 0 ? workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BANDTOUCH_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            w = std::min(w, cap);
        }
    }
    w = std::max(1, w);
    return static_cast<int>(std::min<std::size_t>(w, points));
}

}  // namespace

void SweepSpec::validate() const {
    if (values.empty()) {
        throw std::invalid_argument("sweep: value grid must be non-empty");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument(
                "sweep: values must be strictly increasing");
        }
    }
    if (axis == SweepAxis::Exponent) {
        for (double v : values) {
            if (std::abs(v - std::lround(v)) > 1e-9 || std::lround(v) < 1) {
                throw std::invalid_argument(
                    "sweep: exponent values must be positive integers");
            }
        }
    }
    if (!measure_p && !measure_delta_phi) {
        throw std::invalid_argument("sweep: at least one measure required");
    }
    if (measure_delta_phi && protocol.kind != ProtocolKind::PL2) {
        throw std::invalid_argument(
            "sweep: delta_phi requires a PL2-kind protocol");
    }
    protocol.validate();
    bandtouch::validate(model_template);
}

SweepResult run_sweep(const SweepSpec& spec, int workers) {
    spec.validate();

    SweepResult result;
    result.spec = spec;
    result.rows.resize(spec.values.size());

    auto evaluate_point = [&spec](std::size_t i) -> SweepRow {
        const double value = spec.values[i];
        ModelSpec model = spec.model_template;
        Protocol protocol = spec.protocol;
        switch (spec.axis) {
            case SweepAxis::Delta:
                model = with_delta(spec.model_template, value);
                break;
            case SweepAxis::Speed:
                protocol.c = value;
                break;
            case SweepAxis::Exponent:
                model = with_exponent(spec.model_template, value);
                break;
        }
        validate(model);

        SweepRow row;
        row.axis_value = value;
        if (spec.measure_delta_phi) {
            const PhaseDecomposition d = split_phase_analysis(model, protocol);
            row.p = d.p_direct;
            row.delta_phi = d.delta_phi;
        } else {
            row.p = transition_probability(evolve(model, protocol));
        }
        return row;
    };

    const int nworkers = resolve_workers(workers, spec.values.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(spec.values.size());
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.values.size()) {
                return;
            }
            try {
                result.rows[i] = evaluate_point(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (int i = 0; i < nworkers; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error(
                    "sweep: point " + format_double(spec.values[i]) +
                    " failed: " + e.what());
            }
        }
    }
    return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    const bool phase = result.spec.measure_delta_phi;
    out << (phase ? "axis_value,p,delta_phi\n" : "axis_value,p\n");
    for (const SweepRow& row : result.rows) {
        out << format_double(row.axis_value) << ',' << format_double(row.p);
        if (phase) {
            out << ',' << format_double(row.delta_phi.value());
        }
        out << '\n';
    }
}

nlohmann::json to_json(const SweepResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& row : result.rows) {
        nlohmann::json r{{"axis_value", row.axis_value}, {"p", row.p}};
        if (row.delta_phi) {
            r["delta_phi"] = *row.delta_phi;
        }
        rows.push_back(std::move(r));
    }

    const SweepSpec& spec = result.spec;
    nlohmann::json measures = nlohmann::json::array();
    if (spec.measure_p) {
        measures.push_back("p");
    }
    if (spec.measure_delta_phi) {
        measures.push_back("delta_phi");
    }
    const nlohmann::json protocol{{"c", spec.protocol.c},
                                  {"dt", spec.protocol.dt},
                                  {"lambda0", spec.protocol.lambda0},
                                  {"lambda_inf", spec.protocol.lambda_inf},
                                  {"epsilon", spec.protocol.epsilon}};
    return nlohmann::json{{"model", model_to_json(spec.model_template)},
                          {"axis", axis_name(spec.axis)},
                          {"values", spec.values},
                          {"measures", measures},
                          {"protocol", protocol},
                          {"rows", rows}};
}

void write_table(const SweepResult& result, const std::filesystem::path& path,
                 TableFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("sweep: cannot open output file " +
                                 path.string());
    }
    if (format == TableFormat::Csv) {
        write_csv(result, out);
    } else {
        out << to_json(result).dump(2) << '\n';
    }
    if (!out) {
        throw std::runtime_error("sweep: write failed for " + path.string());
    }
}

}  // namespace bandtouch

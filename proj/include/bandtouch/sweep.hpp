#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bandtouch/dynamics.hpp"

namespace bandtouch {

enum class SweepAxis { Delta, Speed, Exponent };

enum class TableFormat { Csv, Json };

/// One-axis parameter sweep of transition probability (and optionally the
/// split-evolution phase ΔΦ) over a model family.
struct SweepSpec {
    ModelSpec model_template;
    SweepAxis axis = SweepAxis::Delta;
    std::vector<double> values;
    Protocol protocol;
    bool measure_p = true;
    bool measure_delta_phi = false;

    /// values strictly increasing and non-empty; at least one measure;
    /// ΔΦ requires a PL2-kind protocol.
    void validate() const;
};

struct SweepRow {
    double axis_value = 0.0;
    double p = 0.0;
    std::optional<double> delta_phi;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SweepSpec spec;  ///< provenance echo, including dt/Λ/ε actually used
};

/// Evaluates every grid point independently. The output is deterministic
/// and identical for any worker count; workers <= 0 uses the available
/// hardware parallelism, capped by the BANDTOUCH_THREADS environment
/// variable. Per-point failures are rethrown annotated with the axis
/// value.
SweepResult run_sweep(const SweepSpec& spec, int workers = 0);

/// CSV header: axis_value,p[,delta_phi]
void write_csv(const SweepResult& result, std::ostream& out);

nlohmann::json to_json(const SweepResult& result);

void write_table(const SweepResult& result, const std::filesystem::path& path,
                 TableFormat format);

}  // namespace bandtouch

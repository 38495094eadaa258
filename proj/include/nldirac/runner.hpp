#pragma once

// Batch front end: turns a RunConfig into model data, scheme runs, condition
// reports and output files.

#include "nldirac/bootstrap.hpp"
#include "nldirac/conditions.hpp"
#include "nldirac/config.hpp"
#include "nldirac/scheme.hpp"
#include "nldirac/spectral.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nldirac {

enum class Command { spectrum, solve, check, sweep, bootstrap, functional };

Command parse_command(std::string_view name);
const char* to_string(Command c);

/// Decomposed model plus the regularity constants when requested.
struct ModelContext {
    SpectralData spectrum;
    std::optional<RegularityConstants> regularity;
};

/// Regularity constants are only estimated for invertible operators.
ModelContext prepare_model(const RunConfig& cfg, bool with_regularity);
bool needs_regularity(const RunConfig& cfg);

/// Samples a field source on the model grid; `scale` multiplies expression values.
SpinorField build_field(const RunConfig& cfg, const FieldSource& c0, const std::optional<FieldSource>& c1,
                        Complex scale = 1.0);

SchemeConfig make_scheme_config(const RunConfig& cfg, const SpectralData& spec);

struct ResolvedConstants {
    AnalyticConstants values;
    std::map<std::string, Provenance> provenance;
};

ResolvedConstants resolve_constants(const RunConfig& cfg, const ModelContext& model, const SchemeConfig& scheme);

struct SolveOutcome {
    IterationReport report;
    // Empty when D_P has a zero mode: the conditions need |lambda_1| > 0.
    std::optional<ResolvedConstants> constants;
    std::optional<ConditionReport> conditions;

    bool certified() const { return conditions && conditions->all_satisfied(); }
    Real R = 1.0;
};

SolveOutcome solve(const RunConfig& cfg, const ModelContext& model);

struct SweepRow {
    int index = 0;
    int i = 0;
    int j = 0;
    std::vector<Real> axis_values;
    std::string verdict;
    int iterations = 0;
    Real pde_residual = 0.0;
    Real boundary_residual = 0.0;
    Real max_ratio = 0.0;
    bool certified = false;
    std::string error;
};

/// Runs every grid point of the configured sweep on `workers` threads; rows are ordered by index.
std::vector<SweepRow> sweep(const RunConfig& cfg, int workers);

void write_sweep_csv(std::ostream& out, const RunConfig& cfg, const std::vector<SweepRow>& rows);
void write_trace_csv(std::ostream& out, const IterationReport& report);
void write_bootstrap_csv(std::ostream& out, const BootstrapTrace& trace);

/// Executes `command`, writing its files into cfg.run.output_dir. Returns the process exit code.
int run_command(const RunConfig& cfg, Command command, std::ostream& log);

}  // namespace nldirac

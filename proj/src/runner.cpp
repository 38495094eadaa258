#include "nldirac/runner.hpp"

#include "nldirac/gagliardo_nirenberg.hpp"
#include "nldirac/variational.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace nldirac {
namespace {

using json = nlohmann::ordered_json;

std::string format_real(Real v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.run.output_dir);
    const auto path = cfg.run.output_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::configuration, "cannot write '" + path.string() + "'");
    return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
    auto out = open_output(cfg, name);
    out << j.dump(2) << '\n';
}

json finite_or_null(Real v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json model_json(const ModelSpec& m) {
    const char* op = m.operator_kind == OperatorKind::dirac_2spinor ? "dirac_2spinor" : "scalar_derivative";
    const char* bc = m.boundary == BoundaryKind::bag1d      ? "bag1d"
                     : m.boundary == BoundaryKind::periodic ? "periodic"
                                                            : "antiperiodic";
    return {{"operator", op},
            {"boundary", bc},
            {"topology", m.grid.topology() == Topology::circle ? "circle" : "interval"},
            {"length", m.grid.length()},
            {"points", m.grid.size()}};
}

json conditions_json(const ResolvedConstants& rc, const ConditionReport& r, const std::optional<Real>& scheme_p) {
    json constants = json::object();
    auto put = [&](const std::string& name, Real value) {
        auto it = rc.provenance.find(name);
        constants[name] = {{"value", value},
                           {"provenance", to_string(it == rc.provenance.end() ? Provenance::computed : it->second)}};
        if (it != rc.provenance.end() && it->second == Provenance::empirical_lower_bound) {
            constants[name]["empirical_lower_bound"] = true;
        }
    };
    const AnalyticConstants& c = rc.values;
    put("c_h", c.c_h);
    put("C_h", c.C_h);
    put("c1", c.c1);
    put("c_half", c.c_half);
    put("K_GN", c.K_GN);
    put("K_GN2", c.K_GN2);
    put("K_FGN", c.K_FGN);
    put("lambda_abs", c.lambda_abs);
    put("lambda1_abs", c.lambda1_abs);
    put("Dg_L2", c.Dg_L2);
    put("g_L2T", c.g_L2T);
    put("g_H1T", c.g_H1T);
    put("Xi", c.Xi);
    put("Lambda_cap", c.Lambda_cap);

    json conds = json::array();
    for (const auto& k : r.conditions) {
        conds.push_back({{"name", k.name},
                         {"lhs", finite_or_null(k.lhs)},
                         {"rhs", finite_or_null(k.rhs)},
                         {"strict", k.strict},
                         {"satisfied", k.satisfied}});
    }
    const Exponents& e = r.exponents;
    json out = {{"mode", to_string(r.mode)},
                {"n", c.n},
                {"p", e.p},
                {"p_A", e.p_A},
                {"p_B", e.p_B},
                {"q", e.q},
                {"theta_A", e.theta_A},
                {"theta_B", e.theta_B},
                {"kappa", e.kappa},
                {"A", r.A},
                {"B", r.B},
                {"epsilon", r.epsilon},
                {"contraction_bound", finite_or_null(r.contraction_bound)},
                {"c3_threshold_ratio", 1.0 / (e.kappa * std::pow(2.0, 1.5) * std::pow(3.0, e.theta_B))},
                {"constants", constants},
                {"conditions", conds},
                {"certified", r.all_satisfied()}};
    if (scheme_p) out["p_matches_scheme"] = std::abs(*scheme_p - e.p) <= 1e-12 * e.p;
    return out;
}

Real gn_value(const ConstantSetting& s, const RunConfig& cfg, const GnSpec& gs, const std::string& name,
              ResolvedConstants& rc) {
    if (s.source != ConstantSetting::Source::estimate) {
        rc.provenance[name] = Provenance::assumed;
        return s.value;
    }
    rc.provenance[name] = Provenance::empirical_lower_bound;
    return estimate_gn_ratio(cfg.model.grid, gs, cfg.constants.gn_trials, cfg.run.seed).value;
}

bool model_keys_overridden(const std::vector<SweepAxis>& axes) {
    for (const auto& a : axes) {
        if (a.name.rfind("model.", 0) == 0) return true;
    }
    return false;
}

}  // namespace

Command parse_command(std::string_view name) {
    if (name == "spectrum") return Command::spectrum;
    if (name == "solve") return Command::solve;
    if (name == "check") return Command::check;
    if (name == "sweep") return Command::sweep;
    if (name == "bootstrap") return Command::bootstrap;
    if (name == "functional") return Command::functional;
    throw Error(ErrorCode::configuration, "unknown command '" + std::string(name) + "'");
}

const char* to_string(Command c) {
    switch (c) {
        case Command::spectrum: return "spectrum";
        case Command::solve: return "solve";
        case Command::check: return "check";
        case Command::sweep: return "sweep";
        case Command::bootstrap: return "bootstrap";
        case Command::functional: return "functional";
    }
    return "unknown";
}

bool needs_regularity(const RunConfig& cfg) {
    using S = ConstantSetting::Source;
    return cfg.constants.c1.source == S::auto_estimate || cfg.constants.c_half.source == S::auto_estimate ||
           cfg.constants.c_half.source == S::formula;
}

ModelContext prepare_model(const RunConfig& cfg, bool with_regularity) {
    ModelContext ctx{decompose(assemble(cfg.model)), std::nullopt};
    if (with_regularity && ctx.spectrum.invertible()) ctx.regularity = estimate_constants(ctx.spectrum);
    return ctx;
}

SpinorField build_field(const RunConfig& cfg, const FieldSource& c0, const std::optional<FieldSource>& c1,
                        Complex scale) {
    const Grid1D& grid = cfg.model.grid;
    const Index rank = cfg.model.rank();
    if (c0.file) {
        std::ifstream in(*c0.file);
        if (!in) throw Error(ErrorCode::configuration, "cannot open sample file '" + c0.file->string() + "'");
        SpinorField f = read_csv(in, grid);
        if (f.rank() != rank) throw Error(ErrorCode::configuration, "sample file rank does not match the model");
        return scale * f;
    }
    SpinorField::Values v = SpinorField::Values::Zero(grid.size(), rank);
    Variables vars{{"L", grid.length()}};
    for (Index i = 0; i < grid.size(); ++i) {
        vars["x"] = grid.point(i);
        v(i, 0) = scale * c0.expression->evaluate(vars);
        if (rank == 2 && c1) {
            if (!c1->expression) throw Error(ErrorCode::configuration, "second component must be an expression");
            v(i, 1) = scale * c1->expression->evaluate(vars);
        }
    }
    return SpinorField(grid, std::move(v));
}

SchemeConfig make_scheme_config(const RunConfig& cfg, const SpectralData& spec) {
    const auto& s = cfg.scheme;
    const Variables vars{{"lambda1", std::abs(spec.lambda1())}};
    const Complex scale = s.g_scale.evaluate(vars);
    SchemeConfig out(build_field(cfg, s.g0, s.g1, scale));
    out.lambda = s.lambda.evaluate(vars);
    out.p = s.p;
    out.a = s.a.evaluate(vars);
    if (s.R) {
        out.R = s.R->evaluate_real(vars);
    } else {
        out.R_auto = true;
    }
    if (s.f0) out.f0 = build_field(cfg, *s.f0, s.f0_1);
    out.xi = s.xi;
    out.lambda_cap = s.lambda_cap;
    out.max_iter = s.max_iter;
    out.tol_cauchy = s.tol_cauchy;
    out.tol_residual = s.tol_residual;
    validate(out);
    return out;
}

ResolvedConstants resolve_constants(const RunConfig& cfg, const ModelContext& model, const SchemeConfig& scheme) {
    using S = ConstantSetting::Source;
    const auto& c = cfg.constants;
    ResolvedConstants rc;
    AnalyticConstants& a = rc.values;
    a.n = c.n;
    a.p = c.p;
    a.p_A = c.p_A;
    a.c_h = c.c_h;
    a.C_h = c.C_h;
    rc.provenance["c_h"] = Provenance::assumed;
    rc.provenance["C_h"] = Provenance::assumed;

    auto regularity = [&]() -> const RegularityConstants& {
        if (!model.regularity) {
            throw Error(ErrorCode::degenerate_form, "regularity constants need an invertible D_P");
        }
        return *model.regularity;
    };
    if (c.c1.source == S::auto_estimate) {
        a.c1 = regularity().c1_emp;
        rc.provenance["c1"] = Provenance::computed;
    } else {
        a.c1 = c.c1.value;
        rc.provenance["c1"] = Provenance::assumed;
    }
    if (c.c_half.source == S::auto_estimate) {
        a.c_half = regularity().c_half_emp;
        rc.provenance["c_half"] = Provenance::computed;
    } else if (c.c_half.source == S::formula) {
        a.c_half = 2.0 * a.c1 * c.c_h * c.c_h * c.iota * c.iota;
        rc.provenance["c_half"] = Provenance::computed;
    } else {
        a.c_half = c.c_half.value;
        rc.provenance["c_half"] = Provenance::assumed;
    }

    const Real p = a.effective_p();
    const Real p_A = a.effective_p_A();
    a.K_GN = gn_value(c.K_GN, cfg, {GnVariant::first, c.n, p, p_A}, "K_GN", rc);
    a.K_GN2 = gn_value(c.K_GN2, cfg, {GnVariant::second, c.n, p, p_A}, "K_GN2", rc);
    a.K_FGN = gn_value(c.K_FGN, cfg, {GnVariant::fractional, c.n, p, p_A}, "K_FGN", rc);

    const SpectralData& spec = model.spectrum;
    if (!spec.invertible()) throw Error(ErrorCode::near_singular, "conditions need an invertible D_P");
    a.lambda_abs = std::abs(scheme.lambda);
    a.lambda1_abs = std::abs(spec.lambda1());
    a.Dg_L2 = l2_norm(apply_D(cfg.model, scheme.g));
    a.g_L2T = l2_norm(scheme.g);
    a.g_H1T = w1q_norm(scheme.g, 2.0);
    a.Xi = scheme.xi;
    a.Lambda_cap = scheme.lambda_cap;
    for (const char* k : {"lambda_abs", "lambda1_abs", "Dg_L2", "g_L2T", "g_H1T"}) rc.provenance[k] = Provenance::computed;
    rc.provenance["Xi"] = Provenance::assumed;
    rc.provenance["Lambda_cap"] = Provenance::assumed;
    return rc;
}

SolveOutcome solve(const RunConfig& cfg, const ModelContext& model) {
    const SchemeConfig scheme = make_scheme_config(cfg, model.spectrum);
    SolveOutcome out;
    out.R = effective_R(model.spectrum, scheme);
    if (model.spectrum.invertible()) {
        out.constants = resolve_constants(cfg, model, scheme);
        out.conditions = check_conditions(out.constants->values, cfg.constants.mode);
    }
    out.report = run(model.spectrum, scheme);
    return out;
}

std::vector<SweepRow> sweep(const RunConfig& cfg, int workers) {
    if (cfg.sweep.empty()) throw Error(ErrorCode::configuration, "sweep needs at least sweep.axis1");
    const bool per_point_model = model_keys_overridden(cfg.sweep);
    std::optional<ModelContext> shared;
    if (!per_point_model) shared = prepare_model(cfg, needs_regularity(cfg));
    const Real lambda1_abs =
        shared ? std::abs(shared->spectrum.lambda1()) : std::abs(prepare_model(cfg, false).spectrum.lambda1());

    std::vector<std::vector<Real>> axis_values;
    for (const auto& axis : cfg.sweep) axis_values.push_back(axis.values(lambda1_abs));
    const int n1 = static_cast<int>(axis_values[0].size());
    const int n2 = axis_values.size() > 1 ? static_cast<int>(axis_values[1].size()) : 1;
    std::vector<SweepRow> rows(static_cast<std::size_t>(n1) * n2);

    auto evaluate = [&](int index) {
        SweepRow& row = rows[index];
        row.index = index;
        row.i = index / n2;
        row.j = index % n2;
        row.axis_values.push_back(axis_values[0][row.i]);
        if (axis_values.size() > 1) row.axis_values.push_back(axis_values[1][row.j]);
        try {
            std::map<std::string, std::string> overrides;
            for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
                overrides[cfg.sweep[a].name] = format_real(row.axis_values[a]);
            }
            const RunConfig point = with_overrides(cfg, overrides);
            std::optional<ModelContext> local;
            if (!shared) local = prepare_model(point, needs_regularity(point));
            const SolveOutcome s = solve(point, shared ? *shared : *local);
            row.verdict = to_string(s.report.verdict);
            row.iterations = s.report.iterations();
            row.pde_residual = s.report.pde_residual;
            row.boundary_residual = s.report.boundary_residual;
            row.max_ratio = s.report.max_ratio();
            row.certified = s.certified();
        } catch (const std::exception& e) {
            row.verdict = "error";
            row.error = e.what();
        }
    };

    std::atomic<int> next{0};
    const int total = static_cast<int>(rows.size());
    auto worker = [&]() {
        for (int k = next++; k < total; k = next++) evaluate(k);
    };
    const int count = std::max(1, std::min(workers, total));
    std::vector<std::thread> threads;
    for (int t = 1; t < count; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    return rows;
}

void write_sweep_csv(std::ostream& out, const RunConfig& cfg, const std::vector<SweepRow>& rows) {
    out << "index,i,j";
    for (const auto& axis : cfg.sweep) out << ',' << axis.name;
    out << ",verdict,iterations,pde_residual,boundary_residual,max_ratio,certified,error\n";
    out << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.index << ',' << r.i << ',' << r.j;
        for (Real v : r.axis_values) out << ',' << v;
        std::string err = r.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        }
        out << ',' << r.verdict << ',' << r.iterations << ',' << r.pde_residual << ',' << r.boundary_residual << ','
            << r.max_ratio << ',' << (r.certified ? "true" : "false") << ',' << err << '\n';
    }
}

void write_trace_csv(std::ostream& out, const IterationReport& report) {
    out << "k,delta_H12D,ratio,u_L2,u_H1,pde_residual\n" << std::setprecision(17);
    for (std::size_t s = 0; s < report.states.size(); ++s) {
        const IterationState& st = report.states[s];
        out << st.k << ',' << st.delta_norm_H12D << ',';
        if (s >= 1) out << report.ratios[s - 1];
        out << ',' << st.l2t_norm << ',' << st.h1t_norm << ',' << st.pde_residual << '\n';
    }
}

void write_bootstrap_csv(std::ostream& out, const BootstrapTrace& trace) {
    out << "M,reciprocal_l,closed_form\n" << std::setprecision(17);
    for (std::size_t m = 0; m < trace.reciprocals.size(); ++m) {
        out << m << ',' << trace.reciprocals[m] << ',' << trace.closed_form[m] << '\n';
    }
}

int run_command(const RunConfig& cfg, Command command, std::ostream& log) {
    switch (command) {
        case Command::spectrum: {
            const ModelContext model = prepare_model(cfg, true);
            const SpectralData& spec = model.spectrum;
            {
                auto out = open_output(cfg, "spectrum.csv");
                out << "k,lambda_k\n" << std::setprecision(17);
                for (Index k = 0; k < spec.dimension(); ++k) out << k << ',' << spec.eigenvalues()(k) << '\n';
            }
            json j = {{"model", model_json(cfg.model)},
                      {"dimension", spec.dimension()},
                      {"lambda1", spec.lambda1()},
                      {"invertible", spec.invertible()},
                      {"max_residual", spec.max_residual()},
                      {"gram_defect", spec.gram_defect()}};
            if (model.regularity) {
                const Real formula = 2.0 * model.regularity->c1_emp * cfg.constants.c_h * cfg.constants.c_h *
                                     cfg.constants.iota * cfg.constants.iota;
                j["c1_emp"] = model.regularity->c1_emp;
                j["c_half_emp"] = model.regularity->c_half_emp;
                j["c_half_formula"] = formula;
            } else {
                j["c1_emp"] = nullptr;
                j["c_half_emp"] = nullptr;
            }
            if (cfg.run.dump_matrix) {
                auto out = open_output(cfg, "matrix.bin");
                write_matrix_binary(out, assemble(cfg.model).matrix());
                j["matrix_dump"] = {{"file", "matrix.bin"},
                                    {"rows", spec.dimension()},
                                    {"cols", spec.dimension()},
                                    {"layout", "row-major little-endian complex128"}};
            }
            write_json(cfg, "spectrum.json", j);
            log << "lambda1 = " << format_real(spec.lambda1()) << (spec.invertible() ? "" : " (not invertible)") << '\n';
            return 0;
        }
        case Command::solve: {
            const ModelContext model = prepare_model(cfg, needs_regularity(cfg));
            const SolveOutcome s = solve(cfg, model);
            {
                auto out = open_output(cfg, "trace.csv");
                write_trace_csv(out, s.report);
            }
            if (!s.report.states.empty()) {
                auto out = open_output(cfg, "solution.csv");
                write_csv(out, s.report.solution());
            }
            json j = {{"verdict", to_string(s.report.verdict)},
                      {"iterations", s.report.iterations()},
                      {"pde_residual", s.report.pde_residual},
                      {"pde_residual_pointwise", s.report.pde_residual_pointwise},
                      {"boundary_residual", s.report.boundary_residual},
                      {"bounds_held", s.report.bounds_held},
                      {"lambda1", model.spectrum.lambda1()},
                      {"conditions_certified", s.certified()},
                      {"max_ratio", finite_or_null(s.report.max_ratio())},
                      {"R", s.R},
                      {"u_L2", s.report.states.empty() ? 0.0 : s.report.states.back().l2t_norm}};
            write_json(cfg, "report.json", j);
            log << "verdict " << to_string(s.report.verdict) << " after " << s.report.iterations() << " iterations\n";
            return 0;
        }
        case Command::check: {
            const ModelContext model = prepare_model(cfg, needs_regularity(cfg));
            const SchemeConfig scheme = make_scheme_config(cfg, model.spectrum);
            const ResolvedConstants rc = resolve_constants(cfg, model, scheme);
            const ConditionReport r = check_conditions(rc.values, cfg.constants.mode);
            write_json(cfg, "conditions.json", conditions_json(rc, r, scheme.p));
            log << (r.all_satisfied() ? "certified" : "not certified") << '\n';
            return 0;
        }
        case Command::sweep: {
            const auto rows = sweep(cfg, cfg.run.workers);
            auto out = open_output(cfg, "sweep.csv");
            write_sweep_csv(out, cfg, rows);
            log << rows.size() << " sweep points\n";
            return 0;
        }
        case Command::bootstrap: {
            const BootstrapTrace t = bootstrap_exponents(cfg.bootstrap.n, cfg.bootstrap.p, cfg.bootstrap.l0);
            {
                auto out = open_output(cfg, "bootstrap.csv");
                write_bootstrap_csv(out, t);
            }
            write_json(cfg, "bootstrap.json",
                       {{"n", t.n},
                        {"p", t.p},
                        {"l0", t.l0},
                        {"m_star", t.m_star ? json(*t.m_star) : json(nullptr)},
                        {"max_deviation", t.max_deviation}});
            log << "M* = " << (t.m_star ? std::to_string(*t.m_star) : std::string("none")) << '\n';
            return 0;
        }
        case Command::functional: {
            const ModelContext model = prepare_model(cfg, false);
            const SpectralData& spec = model.spectrum;
            const int n = cfg.functional.n.value_or(cfg.constants.n);
            const Index count = std::min<Index>(cfg.functional.count, spec.dimension());
            auto out = open_output(cfg, "functional.csv");
            out << "k,lambda_k,F\n" << std::setprecision(17);
            for (Index k = 0; k < count; ++k) {
                out << k << ',' << spec.eigenvalues()(k) << ',';
                try {
                    out << variational_functional(spec, spec.eigenfunction(k), n);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::degenerate_pairing) throw;
                    out << "nan";
                }
                out << '\n';
            }
            log << count << " functional values\n";
            return 0;
        }
    }
    return 1;
}

}  // namespace nldirac

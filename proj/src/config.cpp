#include "nldirac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

namespace nldirac {
namespace {

const std::set<std::string> sections = {"model", "scheme", "constants", "sweep", "bootstrap", "functional", "run"};

const std::set<std::string> known_keys = {
    "model.operator",       "model.boundary",       "model.length",        "model.points",
    "model.topology",       "scheme.lambda",        "scheme.p",            "scheme.g",
    "scheme.g0",            "scheme.g1",            "scheme.g_scale",      "scheme.a",
    "scheme.R",             "scheme.f0",            "scheme.f0_1",         "scheme.xi",
    "scheme.lambda_cap",    "scheme.max_iter",      "scheme.tol_cauchy",   "scheme.tol_residual",
    "constants.n",          "constants.p",          "constants.p_A",       "constants.c_h",
    "constants.C_h",        "constants.c1",         "constants.c_half",    "constants.iota",
    "constants.K_GN",       "constants.K_GN2",      "constants.K_FGN",     "constants.gn_trials",
    "constants.mode",       "sweep.axis1",          "sweep.axis2",         "bootstrap.n",
    "bootstrap.p",          "bootstrap.l0",         "functional.count",    "functional.n",
    "run.output_dir",       "run.seed",             "run.workers",         "run.dump_matrix",
};

const std::set<std::string> sweepable_keys = {
    "model.length",      "scheme.lambda",    "scheme.p",        "scheme.g_scale", "scheme.a",
    "scheme.R",          "scheme.xi",        "scheme.lambda_cap", "constants.p_A", "constants.c_h",
    "constants.C_h",     "constants.iota",   "constants.c1",    "constants.c_half", "constants.K_GN",
    "constants.K_GN2",   "constants.K_FGN",
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(int line, const std::string& what) {
    throw Error(ErrorCode::configuration, "line " + std::to_string(line) + ": " + what);
}

// Typed accessors over the raw map; every failure names the key path.
class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    const RawEntry* find(const std::string& key) const {
        auto it = raw_.find(key);
        return it == raw_.end() ? nullptr : &it->second;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const RawEntry* e = find(key);
        const std::string where = e ? "line " + std::to_string(e->line) + ": " : std::string();
        throw Error(ErrorCode::configuration, where + "key '" + key + "': " + what);
    }

    Expression expression(const std::string& key) const {
        try {
            return Expression::parse(find(key)->value);
        } catch (const Error& err) {
            fail(key, err.what());
        }
    }

    /// Real number; expressions may not reference lambda1 here.
    Real number(const std::string& key, Real fallback) const {
        if (!find(key)) return fallback;
        try {
            return expression(key).evaluate_real();
        } catch (const Error& err) {
            fail(key, std::string("expected a real number (") + err.what() + ")");
        }
    }

    std::optional<Real> optional_number(const std::string& key) const {
        if (!find(key)) return std::nullopt;
        return number(key, 0.0);
    }

    int integer(const std::string& key, int fallback) const {
        if (!find(key)) return fallback;
        const Real v = number(key, 0.0);
        if (v != std::round(v) || std::abs(v) > 1e9) fail(key, "expected an integer");
        return static_cast<int>(v);
    }

    std::string word(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) const {
        if (!find(key)) return fallback;
        const std::string v = find(key)->value;
        if (!allowed.count(v)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(key, "expected one of {" + list + "}, got '" + v + "'");
        }
        return v;
    }

    bool boolean(const std::string& key, bool fallback) const {
        return word(key, fallback ? "true" : "false", {"true", "false"}) == "true";
    }

    FieldSource field(const std::string& key, const std::filesystem::path& base) const {
        static const std::regex file_re(R"(^\s*sample_file\(\s*\"([^\"]*)\"\s*\)\s*$)");
        const std::string v = find(key)->value;
        std::smatch m;
        FieldSource src;
        if (std::regex_match(v, m, file_re)) {
            std::filesystem::path p = m[1].str();
            if (p.is_relative()) p = base / p;
            if (!std::filesystem::exists(p)) fail(key, "sample file '" + p.string() + "' does not exist");
            src.file = p;
        } else {
            src.expression = expression(key);
        }
        return src;
    }

    ConstantSetting constant(const std::string& key, const std::set<std::string>& words) const {
        ConstantSetting s;
        const RawEntry* e = find(key);
        if (!e) return s;
        if (words.count(e->value)) {
            if (e->value == "auto") s.source = ConstantSetting::Source::auto_estimate;
            if (e->value == "formula") s.source = ConstantSetting::Source::formula;
            if (e->value == "estimate") s.source = ConstantSetting::Source::estimate;
            return s;
        }
        s.value = number(key, 1.0);
        if (!(s.value > 0.0)) fail(key, "must be positive");
        return s;
    }

private:
    const RawConfig& raw_;
};

void require(bool ok, const Reader& r, const std::string& key, const std::string& what) {
    if (!ok) r.fail(key, what);
}

SweepAxis parse_axis(const Reader& r, const std::string& key) {
    std::istringstream in(r.find(key)->value);
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    if (tok.size() != 4 && tok.size() != 5) r.fail(key, "expected 'name min max count [lin|log]'");
    SweepAxis axis;
    axis.name = tok[0];
    if (!is_sweepable(axis.name)) r.fail(key, "parameter '" + axis.name + "' cannot be swept");
    try {
        axis.min = Expression::parse(tok[1]);
        axis.max = Expression::parse(tok[2]);
        const Real count = Expression::parse(tok[3]).evaluate_real();
        if (count != std::round(count) || count < 2 || count > 1e6) r.fail(key, "count must be an integer >= 2");
        axis.count = static_cast<int>(count);
    } catch (const Error& err) {
        if (err.code() == ErrorCode::configuration) throw;
        r.fail(key, err.what());
    }
    if (tok.size() == 5) {
        if (tok[4] != "lin" && tok[4] != "log") r.fail(key, "scale must be lin or log");
        axis.log_scale = tok[4] == "log";
    }
    return axis;
}

RunConfig build(const RawConfig& raw, const std::filesystem::path& base) {
    for (const auto& [key, entry] : raw) {
        if (!known_keys.count(key)) fail_at(entry.line, "unknown key '" + key + "'");
    }
    const Reader r(raw);
    RunConfig cfg;
    cfg.raw = raw;
    cfg.base_dir = base;

    // [model]
    const std::string boundary = r.word("model.boundary", "antiperiodic", {"antiperiodic", "bag1d", "periodic"});
    const BoundaryKind bk = boundary == "bag1d"      ? BoundaryKind::bag1d
                            : boundary == "periodic" ? BoundaryKind::periodic
                                                     : BoundaryKind::antiperiodic;
    const std::string op = r.word("model.operator", bk == BoundaryKind::bag1d ? "dirac_2spinor" : "scalar_derivative",
                                  {"scalar_derivative", "dirac_2spinor"});
    const std::string topo = r.word("model.topology", bk == BoundaryKind::periodic ? "circle" : "interval",
                                    {"interval", "circle"});
    const Real length = r.number("model.length", 1.0);
    require(length > 0.0, r, "model.length", "must be positive");
    const int points = r.integer("model.points", 256);
    require(points >= static_cast<int>(Grid1D::min_points), r, "model.points", "must be >= 8");
    cfg.model = ModelSpec{Grid1D(length, points, topo == "circle" ? Topology::circle : Topology::interval),
                          op == "dirac_2spinor" ? OperatorKind::dirac_2spinor : OperatorKind::scalar_derivative, bk};
    try {
        validate(cfg.model);
    } catch (const Error& err) {
        r.fail(r.find("model.boundary") ? "model.boundary" : "model.operator", err.what());
    }

    // [scheme]
    auto& s = cfg.scheme;
    if (r.find("scheme.lambda")) s.lambda = r.expression("scheme.lambda");
    s.p = r.number("scheme.p", 2.0);
    require(s.p >= 2.0, r, "scheme.p", "must be >= 2");
    if (r.find("scheme.g") && r.find("scheme.g0")) r.fail("scheme.g0", "give either scheme.g or scheme.g0");
    if (r.find("scheme.g")) s.g0 = r.field("scheme.g", base);
    if (r.find("scheme.g0")) s.g0 = r.field("scheme.g0", base);
    if (r.find("scheme.g1")) s.g1 = r.field("scheme.g1", base);
    if (r.find("scheme.g_scale")) s.g_scale = r.expression("scheme.g_scale");
    if (r.find("scheme.a")) s.a = r.expression("scheme.a");
    if (r.find("scheme.R")) {
        if (r.find("scheme.R")->value == "auto") {
            s.R.reset();
        } else {
            s.R = r.expression("scheme.R");
        }
    } else {
        s.R = Expression::parse("1");
    }
    if (r.find("scheme.f0")) s.f0 = r.field("scheme.f0", base);
    if (r.find("scheme.f0_1")) s.f0_1 = r.field("scheme.f0_1", base);
    if (cfg.model.rank() == 1) {
        if (s.g1) r.fail("scheme.g1", "second component given for a scalar model");
        if (s.f0_1) r.fail("scheme.f0_1", "second component given for a scalar model");
    }
    s.xi = r.number("scheme.xi", 1.0);
    require(s.xi > 0.0, r, "scheme.xi", "must be positive");
    s.lambda_cap = r.number("scheme.lambda_cap", 1.0);
    require(s.lambda_cap > 0.0, r, "scheme.lambda_cap", "must be positive");
    s.max_iter = r.integer("scheme.max_iter", 200);
    require(s.max_iter >= 1, r, "scheme.max_iter", "must be >= 1");
    s.tol_cauchy = r.number("scheme.tol_cauchy", 1e-12);
    require(s.tol_cauchy > 0.0, r, "scheme.tol_cauchy", "must be positive");
    s.tol_residual = r.number("scheme.tol_residual", 1e-7);
    require(s.tol_residual > 0.0, r, "scheme.tol_residual", "must be positive");
    for (const char* key : {"scheme.lambda", "scheme.g_scale", "scheme.a"}) {
        if (r.find(key)) {
            const Expression e = r.expression(key);
            for (const char* v : {"x", "L"}) {
                if (e.uses(v)) r.fail(key, std::string("may not depend on ") + v);
            }
        }
    }

    // [constants]
    auto& c = cfg.constants;
    c.n = r.integer("constants.n", 2);
    require(c.n >= 2, r, "constants.n", "must be >= 2");
    c.p = r.optional_number("constants.p");
    if (c.p) require(*c.p >= 2.0, r, "constants.p", "must be >= 2");
    c.p_A = r.optional_number("constants.p_A");
    if (c.p_A) {
        const Real p = c.p ? *c.p : 2.0 * c.n / (c.n - 1.0);
        const auto [lo, hi] = p_A_window(c.n, p);
        require(*c.p_A >= lo && *c.p_A <= hi, r, "constants.p_A", "outside the admissible window");
    }
    c.c_h = r.number("constants.c_h", 1.0);
    require(c.c_h > 0.0, r, "constants.c_h", "must be positive");
    c.C_h = r.number("constants.C_h", 1.0);
    require(c.C_h > 0.0, r, "constants.C_h", "must be positive");
    c.c1 = r.constant("constants.c1", {"auto"});
    c.c_half = r.constant("constants.c_half", {"auto", "formula"});
    c.iota = r.number("constants.iota", 1.0);
    require(c.iota > 0.0, r, "constants.iota", "must be positive");
    c.K_GN = r.constant("constants.K_GN", {"estimate"});
    c.K_GN2 = r.constant("constants.K_GN2", {"estimate"});
    c.K_FGN = r.constant("constants.K_FGN", {"estimate"});
    c.gn_trials = r.integer("constants.gn_trials", 200);
    require(c.gn_trials >= 1, r, "constants.gn_trials", "must be >= 1");
    const std::string mode = r.word("constants.mode", "C_final", {"C_final", "B_explicit", "A_raw"});
    c.mode = mode == "A_raw" ? ConditionMode::A_raw : mode == "B_explicit" ? ConditionMode::B_explicit : ConditionMode::C_final;

    // [sweep]
    for (const char* key : {"sweep.axis1", "sweep.axis2"}) {
        if (r.find(key)) cfg.sweep.push_back(parse_axis(r, key));
    }
    if (cfg.sweep.size() == 2 && cfg.sweep[0].name == cfg.sweep[1].name) {
        r.fail("sweep.axis2", "both axes vary " + cfg.sweep[0].name);
    }

    // [bootstrap]
    cfg.bootstrap.n = r.integer("bootstrap.n", 3);
    require(cfg.bootstrap.n >= 3, r, "bootstrap.n", "must be >= 3");
    cfg.bootstrap.p = r.number("bootstrap.p", 3.0);
    require(cfg.bootstrap.p > 2.0, r, "bootstrap.p", "must be > 2");
    cfg.bootstrap.l0 = r.number("bootstrap.l0", 6.0);
    require(cfg.bootstrap.l0 > 0.0, r, "bootstrap.l0", "must be positive");

    // [functional]
    cfg.functional.count = r.integer("functional.count", 10);
    require(cfg.functional.count >= 1, r, "functional.count", "must be >= 1");
    if (r.find("functional.n")) {
        cfg.functional.n = r.integer("functional.n", 2);
        require(*cfg.functional.n >= 2, r, "functional.n", "must be >= 2");
    }

    // [run]
    if (const RawEntry* e = r.find("run.output_dir")) cfg.run.output_dir = e->value;
    if (const RawEntry* e = r.find("run.seed")) {
        const std::string v = e->value;
        if (v.empty() || !std::all_of(v.begin(), v.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) ||
            v.size() > 19) {
            r.fail("run.seed", "expected a non-negative integer");
        }
        cfg.run.seed = std::stoull(v);
    }
    cfg.run.workers = r.integer("run.workers", 1);
    require(cfg.run.workers >= 1, r, "run.workers", "must be >= 1");
    cfg.run.dump_matrix = r.boolean("run.dump_matrix", false);
    return cfg;
}

}  // namespace

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::assumed: return "assumed";
        case Provenance::computed: return "computed";
        case Provenance::empirical_lower_bound: return "empirical_lower_bound";
    }
    return "unknown";
}

std::vector<Real> SweepAxis::values(Real lambda1_abs) const {
    const Variables vars{{"lambda1", lambda1_abs}};
    const Real lo = min.evaluate_real(vars);
    const Real hi = max.evaluate_real(vars);
    if (log_scale && !(lo > 0.0 && hi > 0.0)) {
        throw Error(ErrorCode::configuration, "log sweep of " + name + " needs positive bounds");
    }
    std::vector<Real> out(count);
    for (int k = 0; k < count; ++k) {
        const Real t = Real(k) / Real(count - 1);
        out[k] = log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    }
    return out;
}

RawConfig parse_raw_config(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string section;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find(" #"); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_at(number, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) fail_at(number, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_at(number, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(number, "missing key");
        const std::string path = section.empty() ? key : section + "." + key;
        if (value.empty()) fail_at(number, "key '" + path + "' has no value");
        if (section.empty() && key.find('.') == std::string::npos) {
            fail_at(number, "key '" + key + "' outside a section needs a section prefix");
        }
        if (raw.count(path)) {
            fail_at(number, "duplicate key '" + path + "' (first set on line " + std::to_string(raw[path].line) + ")");
        }
        raw[path] = RawEntry{value, number};
    }
    return raw;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    return build(parse_raw_config(text), base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::configuration, "cannot open config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

RunConfig with_overrides(const RunConfig& cfg, const std::map<std::string, std::string>& overrides) {
    RawConfig raw = cfg.raw;
    for (const auto& [key, value] : overrides) {
        auto it = raw.find(key);
        raw[key] = RawEntry{value, it == raw.end() ? 0 : it->second.line};
    }
    RunConfig out = build(raw, cfg.base_dir);
    out.run = cfg.run;
    return out;
}

bool is_sweepable(const std::string& key) { return sweepable_keys.count(key) > 0; }

}  // namespace nldirac

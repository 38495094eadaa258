#pragma once

// Run configuration: sectioned `key = value` text.
//
//   # comment
//   scheme.lambda = 0.05*pi      dotted keys are allowed before any section
//   [model]
//   boundary = antiperiodic
//
// Every value is validated against a fixed schema; unknown keys, duplicate
// keys, type mismatches and range violations are errors naming the key path
// and line.

#include "nldirac/assembly.hpp"
#include "nldirac/conditions.hpp"
#include "nldirac/expression.hpp"
#include "nldirac/gagliardo_nirenberg.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nldirac {

struct RawEntry {
    std::string value;
    int line = 0;
};

/// Key path ("section.key") -> raw value, in file order of keys.
using RawConfig = std::map<std::string, RawEntry>;

RawConfig parse_raw_config(const std::string& text);

/// Field datum: closed-form expression in x (and L, pi, ...) or a CSV file.
struct FieldSource {
    std::optional<Expression> expression;
    std::optional<std::filesystem::path> file;
};

enum class Provenance { assumed, computed, empirical_lower_bound };

const char* to_string(Provenance p);

/// Numeric constant or a request to derive it.
struct ConstantSetting {
    enum class Source { value, auto_estimate, formula, estimate } source = Source::value;
    Real value = 1.0;
};

struct SweepAxis {
    std::string name;  // key path, e.g. scheme.lambda
    Expression min;    // may reference lambda1 = |lambda_1|
    Expression max;
    int count = 2;
    bool log_scale = false;

    std::vector<Real> values(Real lambda1_abs) const;
};

struct RunConfig {
    RawConfig raw;
    std::filesystem::path base_dir;

    ModelSpec model{Grid1D(1.0, 256, Topology::interval), OperatorKind::scalar_derivative, BoundaryKind::antiperiodic};

    struct Scheme {
        Expression lambda = Expression::parse("0");
        Real p = 2.0;
        FieldSource g0{Expression::parse("0"), {}};
        std::optional<FieldSource> g1;
        Expression g_scale = Expression::parse("1");
        Expression a = Expression::parse("0");
        std::optional<Expression> R;  // empty means auto
        std::optional<FieldSource> f0;
        std::optional<FieldSource> f0_1;
        Real xi = 1.0;
        Real lambda_cap = 1.0;
        int max_iter = 200;
        Real tol_cauchy = 1e-12;
        Real tol_residual = 1e-7;
    } scheme;

    struct Constants {
        int n = 2;
        std::optional<Real> p;
        std::optional<Real> p_A;
        Real c_h = 1.0;
        Real C_h = 1.0;
        ConstantSetting c1;
        ConstantSetting c_half;
        Real iota = 1.0;
        ConstantSetting K_GN;
        ConstantSetting K_GN2;
        ConstantSetting K_FGN;
        int gn_trials = 200;
        ConditionMode mode = ConditionMode::C_final;
    } constants;

    std::vector<SweepAxis> sweep;

    struct Bootstrap {
        int n = 3;
        Real p = 3.0;
        Real l0 = 6.0;
    } bootstrap;

    struct Functional {
        int count = 10;
        std::optional<int> n;  // defaults to constants.n
    } functional;

    struct Run {
        std::filesystem::path output_dir = "out";
        std::uint64_t seed = 0;
        int workers = 1;
        bool dump_matrix = false;
    } run;
};

/// Parses and validates; relative file references resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Rebuilds a configuration after replacing (or adding) raw entries.
RunConfig with_overrides(const RunConfig& cfg, const std::map<std::string, std::string>& overrides);

/// Key paths that a sweep axis may vary.
bool is_sweepable(const std::string& key);

}  // namespace nldirac

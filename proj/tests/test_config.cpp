#include "nldirac/config.hpp"

#include <gtest/gtest.h>

using namespace nldirac;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::configuration) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(RawConfig, SectionsCommentsAndDottedKeys) {
    const RawConfig raw = parse_raw_config(
        "# header\n"
        "scheme.lambda = 2\n"
        "[model]\n"
        "; other comment\n"
        "points = 64   # trailing\n"
        "\n"
        "[scheme]\n"
        "p = 3\n");
    ASSERT_EQ(raw.size(), 3u);
    EXPECT_EQ(raw.at("model.points").value, "64");
    EXPECT_EQ(raw.at("model.points").line, 5);
    EXPECT_EQ(raw.at("scheme.lambda").value, "2");
    EXPECT_EQ(raw.at("scheme.p").line, 8);
}

TEST(RawConfig, Errors) {
    EXPECT_TRUE(contains(error_of("[model]\npoints = 8\npoints = 9\n"), "first set on line 2"));
    EXPECT_TRUE(contains(error_of("[modl]\n"), "line 1"));
    EXPECT_TRUE(contains(error_of("[model]\npoints\n"), "line 2"));
    EXPECT_TRUE(contains(error_of("points = 8\n"), "section prefix"));
    EXPECT_TRUE(contains(error_of("[model]\npoints =\n"), "no value"));
    EXPECT_TRUE(contains(error_of("[model\n"), "malformed"));
}

TEST(ParseConfig, EmptyGivesDefaults) {
    const RunConfig cfg = parse_config("[scheme]\n");
    EXPECT_EQ(cfg.model.boundary, BoundaryKind::antiperiodic);
    EXPECT_EQ(cfg.model.grid.size(), 256);
    EXPECT_EQ(cfg.scheme.a.evaluate(), Complex(0.0));
    ASSERT_TRUE(cfg.scheme.R);
    EXPECT_EQ(cfg.scheme.R->evaluate_real(), 1.0);
    EXPECT_EQ(cfg.scheme.xi, 1.0);
    EXPECT_EQ(cfg.scheme.lambda_cap, 1.0);
    EXPECT_EQ(cfg.constants.c1.source, ConstantSetting::Source::value);
    EXPECT_EQ(cfg.constants.c1.value, 1.0);
    EXPECT_EQ(cfg.constants.K_GN.value, 1.0);
    EXPECT_EQ(cfg.constants.mode, ConditionMode::C_final);
    EXPECT_TRUE(cfg.sweep.empty());
    EXPECT_EQ(cfg.run.seed, 0u);
}

TEST(ParseConfig, UnknownKeyNamesPath) {
    const std::string msg = error_of("schme.lambda = 1\n");
    EXPECT_TRUE(contains(msg, "schme.lambda")) << msg;
    EXPECT_TRUE(contains(error_of("[scheme]\nlamda = 1\n"), "scheme.lamda"));
}

TEST(ParseConfig, PiArithmetic) {
    const RunConfig cfg = parse_config("[scheme]\nlambda = 0.05*pi\n");
    EXPECT_NEAR(cfg.scheme.lambda.evaluate().real(), 0.15707963267948966, 1e-16);
}

TEST(ParseConfig, TypeAndRangeErrors) {
    EXPECT_TRUE(contains(error_of("[model]\npoints = 12.5\n"), "model.points"));
    EXPECT_TRUE(contains(error_of("[model]\npoints = 4\n"), ">= 8"));
    EXPECT_TRUE(contains(error_of("[model]\nlength = -1\n"), "model.length"));
    EXPECT_TRUE(contains(error_of("[model]\nboundary = dirichlet\n"), "expected one of"));
    EXPECT_TRUE(contains(error_of("[scheme]\np = 1.5\n"), "scheme.p"));
    EXPECT_TRUE(contains(error_of("[scheme]\nmax_iter = 0\n"), "scheme.max_iter"));
    EXPECT_TRUE(contains(error_of("[scheme]\nlambda = 2*x\n"), "may not depend on x"));
    EXPECT_TRUE(contains(error_of("[scheme]\ng = 1 +\n"), "scheme.g"));
    EXPECT_TRUE(contains(error_of("[constants]\nc1 = maybe\n"), "constants.c1"));
    EXPECT_TRUE(contains(error_of("[constants]\nc1 = -2\n"), "positive"));
    EXPECT_TRUE(contains(error_of("[constants]\np_A = 3\n"), "window"));
    EXPECT_TRUE(contains(error_of("[constants]\nmode = D\n"), "constants.mode"));
    EXPECT_TRUE(contains(error_of("[run]\nseed = -3\n"), "run.seed"));
    EXPECT_TRUE(contains(error_of("[run]\ndump_matrix = yes\n"), "run.dump_matrix"));
    EXPECT_TRUE(contains(error_of("[bootstrap]\np = 2\n"), "bootstrap.p"));
}

TEST(ParseConfig, ModelCompatibility) {
    EXPECT_TRUE(contains(error_of("[model]\nboundary = bag1d\noperator = scalar_derivative\n"), "model.boundary"));
    const RunConfig bag = parse_config("[model]\nboundary = bag1d\n[scheme]\ng0 = 1\ng1 = i\n");
    EXPECT_EQ(bag.model.rank(), 2);
    EXPECT_TRUE(bag.scheme.g1);
    EXPECT_TRUE(contains(error_of("[scheme]\ng1 = 1\n"), "scalar model"));
    const RunConfig circle = parse_config("[model]\nboundary = periodic\nlength = 2*pi\n");
    EXPECT_EQ(circle.model.grid.topology(), Topology::circle);
}

TEST(ParseConfig, ConstantSources) {
    const RunConfig cfg = parse_config(
        "[constants]\nc1 = auto\nc_half = formula\nK_GN = estimate\nK_GN2 = 2.5\niota = 1.5\nn = 3\n");
    EXPECT_EQ(cfg.constants.c1.source, ConstantSetting::Source::auto_estimate);
    EXPECT_EQ(cfg.constants.c_half.source, ConstantSetting::Source::formula);
    EXPECT_EQ(cfg.constants.K_GN.source, ConstantSetting::Source::estimate);
    EXPECT_EQ(cfg.constants.K_GN2.value, 2.5);
    EXPECT_EQ(cfg.constants.iota, 1.5);
    EXPECT_EQ(cfg.constants.n, 3);
    EXPECT_TRUE(contains(error_of("[constants]\nc1 = formula\n"), "constants.c1"));
}

TEST(ParseConfig, RAuto) {
    EXPECT_FALSE(parse_config("[scheme]\nR = auto\n").scheme.R);
    EXPECT_EQ(parse_config("[scheme]\nR = 2/lambda1\n").scheme.R->evaluate_real({{"lambda1", 4.0}}), 0.5);
}

TEST(ParseConfig, SampleFile) {
    const RunConfig cfg = parse_config("[model]\npoints = 16\n[scheme]\ng = sample_file(\"g16.csv\")\n",
                                       NLDIRAC_TEST_DATA_DIR);
    ASSERT_TRUE(cfg.scheme.g0.file);
    EXPECT_FALSE(cfg.scheme.g0.expression);
    EXPECT_TRUE(contains(error_of("[scheme]\ng = sample_file(\"missing.csv\")\n"), "does not exist"));
}

TEST(Sweep, AxisParsingAndValues) {
    const RunConfig cfg = parse_config("[sweep]\naxis1 = scheme.lambda 0 lambda1/2 11\naxis2 = scheme.p 2 8 3 log\n");
    ASSERT_EQ(cfg.sweep.size(), 2u);
    const auto lam = cfg.sweep[0].values(pi);
    ASSERT_EQ(lam.size(), 11u);
    EXPECT_EQ(lam.front(), 0.0);
    EXPECT_NEAR(lam.back(), pi / 2.0, 1e-15);
    EXPECT_NEAR(lam[5], pi / 4.0, 1e-15);
    const auto p = cfg.sweep[1].values(pi);
    EXPECT_NEAR(p[1], 4.0, 1e-14);
    EXPECT_TRUE(contains(error_of("[sweep]\naxis1 = scheme.max_iter 1 2 3\n"), "cannot be swept"));
    EXPECT_TRUE(contains(error_of("[sweep]\naxis1 = scheme.lambda 0 1 1\n"), "count"));
    EXPECT_TRUE(contains(error_of("[sweep]\naxis1 = scheme.lambda 0 1\n"), "expected"));
    EXPECT_TRUE(contains(error_of("[sweep]\naxis1 = scheme.lambda 0 1 3\naxis2 = scheme.lambda 0 1 3\n"), "both"));
    EXPECT_THROW(parse_config("[sweep]\naxis1 = scheme.lambda 0 1 3 log\n").sweep[0].values(1.0), Error);
}

TEST(Overrides, ReplaceAndAdd) {
    const RunConfig cfg = parse_config("[scheme]\nlambda = 1\n[run]\nseed = 9\n");
    const RunConfig out = with_overrides(cfg, {{"scheme.lambda", "3"}, {"scheme.p", "5"}});
    EXPECT_EQ(out.scheme.lambda.evaluate(), Complex(3.0));
    EXPECT_EQ(out.scheme.p, 5.0);
    EXPECT_EQ(out.run.seed, 9u);
    EXPECT_THROW(with_overrides(cfg, {{"scheme.p", "1"}}), Error);
}

TEST(LoadConfig, MissingFile) {
    try {
        load_config("/nonexistent/cfg.ini");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::configuration);
    }
}

TEST(LoadConfig, ShippedConfigsParse) {
    for (const char* name : {"spectrum", "solve_linear", "solve_contraction", "check", "check_estimated_gn", "sweep",
                             "bag_solve", "bootstrap", "functional"}) {
        EXPECT_NO_THROW(load_config(std::string(NLDIRAC_TEST_DATA_DIR) + "/../../configs/" + name + ".ini")) << name;
    }
}

#include "tlnum/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace tln;

namespace {

StudyConfig small(const std::string& study) {
    StudyConfig c = StudyConfig::defaults(study);
    c.resolutions = {16, 32};
    c.resolutions_1d = {128, 256};
    return c;
}

}

TEST_CASE("config parsing") {
    auto c = StudyConfig::parse("study = equivalence\n"
                                "# comment line\n"
                                "functions = sin, affine   # trailing comment\n"
                                "u = 1, inf\n"
                                "resolutions = 32, 64\n"
                                "maps = shear:0.5; perturbation:0.05,2\n");
    CHECK(c.study == "equivalence");
    CHECK(c.functions == std::vector<std::string>{"sin", "affine"});
    CHECK(std::isinf(c.u[1]));
    CHECK(c.resolutions == std::vector<int>{32, 64});
    CHECK(c.maps.size() == 2);
    CHECK(c.maps[1] == "perturbation:0.05,2");

    CHECK_THROWS_AS(StudyConfig::parse("resolutions = 64, 32\n"), Error);
    CHECK_THROWS_AS(StudyConfig::parse("bogus = 1\n"), Error);
    CHECK_THROWS_AS(StudyConfig::parse("no equals sign\n"), Error);
    CHECK_THROWS_AS(StudyConfig::parse("s = abc\n"), Error);
    CHECK_THROWS_AS(StudyConfig::parse("study = nonsense\n"), Error);
    CHECK_THROWS_AS(StudyConfig::parse("functions = nope\n"), Error);
    // j outside 1..floor(s) is a config error for the interpolation study.
    CHECK_THROWS_AS(StudyConfig::parse("study = interpolation\ns = 2.5\nj = 3\n"), Error);
}

TEST_CASE("spec grid filters by the index condition") {
    StudyConfig c;
    c.s = {0.5, 1.5};
    c.p = {1.0, 2.0};
    c.q = {2.0};
    c.u = {1.0, 2.0};
    c.rho = {1.0};
    // d = 2, sigma = 1/2 > 2/min(p,q) - 2/u rules out only p = 1 with u = 2.
    auto g = c.spec_grid(2);
    for (const auto& sp : g) CHECK_NOTHROW(sp.validate(2));
    bool has_p1_u2 = false;
    for (const auto& sp : g)
        if (sp.p == 1.0 && sp.u == 2.0 && sp.s == 0.5) has_p1_u2 = true;
    CHECK_FALSE(has_p1_u2);
    CHECK(g.size() == 6);
}

TEST_CASE("suite functions") {
    CHECK(suite_function("const", 2, 0.5)({0.3, 0.7, 0}) == 1.5);
    CHECK(suite_function("affine", 1, 0.5)({0.25, 0, 0}) == 1.5);
    CHECK(suite_function("abs08", 2, 0.5)({0.5, 0.9, 0}) == 0.0);
    // crit is odd about 1/2 along each axis and has |t|^s growth.
    auto crit = suite_function("crit", 1, 2.5);
    CHECK(crit({0.75, 0, 0}) == doctest::Approx(std::pow(0.25, 2.5)));
    CHECK(crit({0.25, 0, 0}) == doctest::Approx(-std::pow(0.25, 2.5)));
    CHECK_THROWS_AS(suite_function("nope", 1, 0.5), Error);
}

TEST_CASE("pass/fail is recomputable from the stored numbers") {
    StudyRow r;
    r.check = "le";
    r.ratio = 0.2;
    r.threshold = 0.25;
    CHECK(recompute_pass(r));
    r.ratio = 0.3;
    CHECK_FALSE(recompute_pass(r));
    r.check = "finite";
    r.ratio = std::nan("");
    CHECK_FALSE(recompute_pass(r));
    r.check = "rel_eq";
    r.lhs = 1.0;
    r.rhs = 1.0 + 1e-13;
    r.threshold = 1e-12;
    CHECK(recompute_pass(r));
    r.rhs = 1.1;
    CHECK_FALSE(recompute_pass(r));
    r.check = "none";
    CHECK(recompute_pass(r));
}

TEST_CASE("empty study emits a header-only csv") {
    StudyReport r;
    r.study = "equivalence";
    std::string csv = report_csv(r);
    CHECK(csv == "study,case,kind,function,map,spec,n,lhs,rhs,ratio,c_f,threshold,check,scored,pass,note\n");
    CHECK(report_long_csv(r) == "study,case,series,n,value\n");
    CHECK(r.all_pass());
}

TEST_CASE("equivalence study on a small grid") {
    StudyConfig c = small("equivalence");
    c.resolutions = {32, 64};  // rho = 1/4 needs two dyadic levels above 4h
    c.functions = {"zero", "affine", "abs08"};
    c.s = {0.5};
    StudyReport rep = study_equivalence(c);
    int excluded = 0, values = 0, mono = 0, drift = 0;
    for (const auto& r : rep.rows) {
        if (r.function == "zero") {
            CHECK((r.kind == "excluded" || r.kind == "monotone"));
            if (r.kind == "monotone") CHECK(r.lhs == 0.0);
        }
        if (r.kind == "excluded") ++excluded;
        if (r.kind == "value") {
            ++values;
            CHECK(std::isfinite(r.ratio));
            CHECK(r.ratio > 0);
        }
        if (r.kind == "monotone") {
            ++mono;
            CHECK(r.pass);
        }
        if (r.kind == "drift") ++drift;
    }
    CHECK(excluded == 2 * 3);  // 3 non-reference (u, rho) pairs at 2 resolutions
    CHECK(values == 2 * 2 * 3);
    CHECK(mono == 2 * 3 * 2);
    CHECK(drift == 2 * 3);
}

TEST_CASE("report json round trip reproduces pass/fail") {
    StudyConfig c = small("interpolation");
    c.domains = {"interval"};
    c.functions = {"sinpi"};
    StudyReport rep = study_interpolation(c);
    REQUIRE(!rep.rows.empty());
    StudyReport back = report_from_json(nlohmann::json::parse(report_to_json(rep).dump()));
    REQUIRE(back.rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = back.rows[i];
        CHECK(a.case_id == b.case_id);
        CHECK(a.pass == b.pass);
        CHECK(recompute_pass(b) == b.pass);
        if (std::isfinite(a.ratio)) CHECK(a.ratio == b.ratio);
        else CHECK(!std::isfinite(b.ratio));
    }
    CHECK(report_csv(back) == report_csv(rep));
}

TEST_CASE("studies are deterministic") {
    StudyConfig c = small("interpolation");
    c.domains = {"square"};
    c.functions = {"sin"};
    auto a = report_csv(study_interpolation(c));
    auto b = report_csv(study_interpolation(c));
    CHECK(a == b);
}

TEST_CASE("interpolation scaling row is exact") {
    StudyConfig c = small("interpolation");
    c.domains = {"interval"};
    c.functions = {"crit"};
    StudyReport rep = study_interpolation(c);
    int seen = 0;
    for (const auto& r : rep.rows)
        if (r.kind == "identity") {
            ++seen;
            CHECK(r.pass);
            CHECK(std::abs(r.lhs - r.rhs) <= 1e-12 * r.rhs);
        }
    CHECK(seen == 1);
}

TEST_CASE("composition calibration freezes the margin") {
    StudyConfig c = small("composition");
    c.maps = {"shear:0.5"};
    c.functions = {"const", "sin"};
    c.s = {0.5};
    StudyReport rep = study_composition(c);
    const double margin = rep.meta.at("margin").get<double>();
    CHECK(margin > 0);
    CHECK(margin <= 1.0);
    for (const auto& r : rep.rows) {
        if (r.kind == "calibration") {
            CHECK_FALSE(r.scored);
            CHECK(r.ratio <= margin);
        }
        if (r.kind == "bound") {
            CHECK(r.scored);
            CHECK(r.threshold == margin);
        }
        // At the identity the formula constant is (1 + 1)(1 + 1) = 4.
        if (r.map == "identity" && r.kind == "calibration") CHECK(r.c_f == doctest::Approx(4.0));
    }
}

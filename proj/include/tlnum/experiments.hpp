#pragma once

#include "tlnum/calculus.hpp"
#include "tlnum/field.hpp"
#include "tlnum/spaces.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tln {

// ____________________________________________________________________________
// Test functions

// Built-in suite members: zero, const, affine, sin, sinpi, abs03, abs08, crit.
// abs* is |x_1 - 1/2|^alpha; crit is sum_i (x_i - 1/2)|x_i - 1/2|^(s-1), which
// sits exactly at smoothness s.
ScalarFn suite_function(const std::string& name, int d, double s);
std::vector<std::string> default_suite();

// ____________________________________________________________________________
// Configuration

struct StudyConfig {
    std::string study = "equivalence";
    std::vector<std::string> domains{"square"};
    std::vector<std::string> maps;           // "name" or "name:p1,p2"
    std::vector<std::string> functions = default_suite();
    std::vector<double> s{0.5, 1.5, 2.5};
    std::vector<double> p{2.0};
    std::vector<double> q{2.0};
    std::vector<double> u{1.0, 2.0};
    std::vector<double> rho{1.0, 0.25};
    std::vector<int> resolutions{64, 128, 256};  // 1/h for planar domains
    std::vector<int> resolutions_1d{1024, 2048, 4096, 8192};
    std::vector<int> j{2};
    std::uint64_t seed = 1;
    double margin = -1.0;                     // <= 0: calibrate on the trivially true rows
    double drift_tol = 0.25;
    double cw = 3.0;
    std::string out_csv, out_json, out_long;

    // Defaults for one study name.
    static StudyConfig defaults(const std::string& study);
    // Flat "key = value" text; '#' starts a comment; lists are comma separated.
    static StudyConfig parse(const std::string& text);
    static StudyConfig load(const std::string& path);

    const std::vector<int>& resolutions_for(int d) const { return d == 1 ? resolutions_1d : resolutions; }
    // Specs of the (s, p, q, u, rho) grid that satisfy the index condition in dimension d.
    std::vector<NormSpec> spec_grid(int d) const;
    // Throws a config error on inconsistent fields.
    void validate() const;
};

// ____________________________________________________________________________
// Reports

// One scored or informational line. `check` decides pass/fail from the stored numbers:
//   none     always passes
//   finite   ratio finite and >= 0
//   le       ratio <= threshold
//   rel_eq   |lhs - rhs| <= threshold * max(|lhs|, |rhs|)
struct StudyRow {
    std::string case_id;
    std::string kind;       // value, drift, interval, calibration, bound, identity, excluded, error
    std::string function;
    std::string map;
    std::string spec;
    int n = 0;              // 1/h, 0 for rows spanning resolutions
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double c_f = 0.0;
    double threshold = 0.0;
    std::string check = "none";
    bool scored = false;
    bool pass = true;
    std::string note;
};

bool recompute_pass(const StudyRow& row);

struct StudyReport {
    std::string study;
    std::uint64_t seed = 1;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<StudyRow> rows;

    void add(StudyRow row);
    bool all_pass() const;
    int scored_count() const;
    int failed_count() const;
};

StudyReport study_equivalence(const StudyConfig& cfg);
StudyReport study_composition(const StudyConfig& cfg);
StudyReport study_inverse(const StudyConfig& cfg);
StudyReport study_holder(const StudyConfig& cfg);
StudyReport study_interpolation(const StudyConfig& cfg);
StudyReport study_extension(const StudyConfig& cfg);
StudyReport run_study(const StudyConfig& cfg);

// Column order of the per-case CSV.
const std::vector<std::string>& report_columns();
std::string report_csv(const StudyReport& r);
// Long format: study,case,series,n,value for every row with a resolution.
std::string report_long_csv(const StudyReport& r);
nlohmann::json report_to_json(const StudyReport& r);
StudyReport report_from_json(const nlohmann::json& j);
// Writes whichever of the three paths are non-empty.
void emit_report(const StudyReport& r, const std::string& csv_path, const std::string& json_path,
                 const std::string& long_path);

}

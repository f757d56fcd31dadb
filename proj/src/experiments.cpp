#include "tlnum/experiments.hpp"

#include "tlnum/extension.hpp"
#include "tlnum/geometry.hpp"
#include "tlnum/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace tln {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "infinity") return kInfinity;
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(ErrorKind::Config, "key '" + key + "': '" + v + "' is not a number");
    }
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(parse_real(key, item));
    return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (double x : parse_reals(key, v)) {
        if (x != std::floor(x) || std::isinf(x)) fail(ErrorKind::Config, "key '" + key + "' needs integers");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

MapFamily parse_map(const std::string& entry, int d) {
    auto colon = entry.find(':');
    std::string name = trim(entry.substr(0, colon));
    std::vector<double> params;
    if (colon != std::string::npos) params = parse_reals("maps", entry.substr(colon + 1));
    return MapFamily::from_name(name, params, d);
}

int map_dim(const std::string& entry) {
    std::string name = trim(entry.substr(0, entry.find(':')));
    if (name == "power" || name == "cubic") return 1;
    if (name == "shear" || name == "perturbation") return 2;
    if (name == "linear") {
        auto n = parse_reals("maps", entry.substr(entry.find(':') + 1)).size();
        return n == 1 ? 1 : n == 4 ? 2 : 3;
    }
    return 0;  // identity fits any dimension
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json num(double x) {
    if (std::isfinite(x)) return x;
    return fmt(x);
}

double from_num(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    std::string s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    return kNaN;
}

double drift(double prev, double last) {
    return std::abs(last / prev - 1.0);
}

// Ratio with the 0/0 = 0 convention used by the monotonicity rows.
double safe_ratio(double a, double b) {
    if (b > 0) return a / b;
    return a > 0 ? kInfinity : 0.0;
}

double max_magnitude(const SampledFunction& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.has(i)) m = std::max(m, f.magnitude(i));
    return m;
}

SampledFunction sample_on(const Domain& dom, double h, const ScalarFn& fn) {
    return sample_scalar(dom.grid(h), dom.inside_fn(), fn, dom.name());
}

std::vector<SampledFunction> map_components(const Domain& dom, double h, const MapFamily& f, bool inverse) {
    std::vector<SampledFunction> out;
    for (int c = 0; c < f.dim(); ++c)
        out.push_back(sample_on(dom, h, [&f, c, inverse](const Point& x) { return (inverse ? f.inverse(x) : f.forward(x))[c]; }));
    return out;
}

// Euclidean combination of the component norms of a vector-valued map.
double vector_tl_norm(const std::vector<SampledFunction>& comps, const NormSpec& spec) {
    double acc = 0.0;
    for (const auto& c : comps) {
        double v = tl_norm(c, spec).total;
        acc += v * v;
    }
    return std::sqrt(acc);
}

Domain image_domain(const Domain& base, const MapFamily& f) {
    if (f.kind() == MapFamily::Kind::Identity) return base;
    return Domain::image(base, f);
}

StudyRow error_row(const std::string& case_id, const std::string& fn, const std::string& map, const std::string& spec, int n,
                   const std::exception& e) {
    StudyRow r;
    r.case_id = case_id;
    r.kind = "error";
    r.function = fn;
    r.map = map;
    r.spec = spec;
    r.n = n;
    r.ratio = kNaN;
    r.check = "finite";
    r.scored = true;
    r.note = e.what();
    return r;
}

// For every case with value rows at two or more resolutions, appends the
// drift row of the final refinement pair.
void add_drift_rows(StudyReport& rep, double tol, bool scored, const std::string& kind = "value") {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const StudyRow*>> by_case;
    for (const auto& r : rep.rows) {
        if (r.kind != kind || r.n == 0) continue;
        if (!by_case.count(r.case_id)) order.push_back(r.case_id);
        by_case[r.case_id].push_back(&r);
    }
    std::vector<StudyRow> extra;
    for (const auto& id : order) {
        auto rows = by_case[id];
        std::sort(rows.begin(), rows.end(), [](const StudyRow* a, const StudyRow* b) { return a->n < b->n; });
        if (rows.size() < 2) continue;
        const StudyRow& a = *rows[rows.size() - 2];
        const StudyRow& b = *rows.back();
        StudyRow d;
        d.case_id = id;
        d.kind = "drift";
        d.function = b.function;
        d.map = b.map;
        d.spec = b.spec;
        d.lhs = a.ratio;
        d.rhs = b.ratio;
        d.ratio = drift(a.ratio, b.ratio);
        d.threshold = tol;
        d.check = "le";
        d.scored = scored;
        d.note = "n " + std::to_string(a.n) + " -> " + std::to_string(b.n);
        extra.push_back(d);
    }
    for (auto& r : extra) rep.add(std::move(r));
}

// Smallest and largest ratio across resolutions for every case.
void add_interval_rows(StudyReport& rep) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, double>> span;
    std::map<std::string, const StudyRow*> last;
    for (const auto& r : rep.rows) {
        if (r.kind != "value" || r.n == 0) continue;
        if (!span.count(r.case_id)) {
            order.push_back(r.case_id);
            span[r.case_id] = {kInfinity, -kInfinity};
        }
        auto& sp = span[r.case_id];
        sp.first = std::min(sp.first, r.ratio);
        sp.second = std::max(sp.second, r.ratio);
        last[r.case_id] = &r;
    }
    std::vector<StudyRow> extra;
    for (const auto& id : order) {
        StudyRow d;
        d.case_id = id;
        d.kind = "interval";
        d.function = last[id]->function;
        d.map = last[id]->map;
        d.spec = last[id]->spec;
        d.lhs = span[id].first;
        d.rhs = span[id].second;
        d.ratio = d.rhs / d.lhs;
        d.check = "finite";
        d.scored = true;
        extra.push_back(d);
    }
    for (auto& r : extra) rep.add(std::move(r));
}

void finish_meta(StudyReport& rep, const StudyConfig& cfg, std::chrono::steady_clock::time_point t0) {
    rep.meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.meta["workers"] = worker_count();
    rep.meta["drift_tol"] = cfg.drift_tol;
    rep.meta["scored"] = rep.scored_count();
    rep.meta["failed"] = rep.failed_count();
}

StudyReport start(const StudyConfig& cfg) {
    cfg.validate();
    StudyReport rep;
    rep.study = cfg.study;
    rep.seed = cfg.seed;
    rep.meta["domains"] = cfg.domains;
    rep.meta["functions"] = cfg.functions;
    rep.meta["maps"] = cfg.maps;
    return rep;
}

// Freezes the margin: the configured one, or the largest ratio among the calibration rows.
double freeze_margin(StudyReport& rep, const StudyConfig& cfg) {
    double margin = cfg.margin;
    if (margin > 0) {
        rep.meta["margin_source"] = "config";
    } else {
        margin = 0.0;
        for (const auto& r : rep.rows)
            if (r.kind == "calibration" && std::isfinite(r.ratio)) margin = std::max(margin, r.ratio);
        rep.meta["margin_source"] = "calibration";
    }
    rep.meta["margin"] = margin;
    for (auto& r : rep.rows) {
        if (r.kind != "calibration" && r.kind != "bound") continue;
        r.threshold = margin;
        r.check = "le";
        r.pass = recompute_pass(r);
    }
    return margin;
}

}

// ____________________________________________________________________________
// Test functions

ScalarFn suite_function(const std::string& name, int d, double s) {
    if (name == "zero") return [](const Point&) { return 0.0; };
    if (name == "const") return [](const Point&) { return 1.5; };
    if (name == "affine")
        return [d](const Point& x) { return d == 1 ? 1.0 + 2.0 * x[0] : 1.0 + 2.0 * x[0] - x[1]; };
    if (name == "sin")
        return [d](const Point& x) { return d == 1 ? std::sin(3.0 * x[0]) : std::sin(3.0 * x[0]) * std::sin(2.0 * x[1]); };
    if (name == "sinpi") {
        return [d](const Point& x) {
            double v = std::sin(std::numbers::pi * x[0]);
            return d == 1 ? v : v * std::sin(std::numbers::pi * x[1]);
        };
    }
    if (name == "abs03") return [](const Point& x) { return std::pow(std::abs(x[0] - 0.5), 0.3); };
    if (name == "abs08") return [](const Point& x) { return std::pow(std::abs(x[0] - 0.5), 0.8); };
    if (name == "crit") {
        return [d, s](const Point& x) {
            double v = 0.0;
            for (int a = 0; a < d; ++a) {
                double t = x[a] - 0.5;
                v += t * std::pow(std::abs(t), s - 1.0);
            }
            return v;
        };
    }
    fail(ErrorKind::Config, "unknown test function '" + name + "'");
}

std::vector<std::string> default_suite() {
    return {"const", "affine", "sin", "abs03", "abs08", "crit"};
}

// ____________________________________________________________________________
// Configuration

StudyConfig StudyConfig::defaults(const std::string& study) {
    StudyConfig c;
    c.study = study;
    if (study == "equivalence") {
        // the struct defaults
    } else if (study == "composition") {
        c.maps = {"shear:0.5", "perturbation:0.05,2"};
        c.functions = {"const", "affine", "sin", "abs08"};
        c.s = {0.5, 1.5};
        c.u = {1.0};
        c.rho = {1.0};
    } else if (study == "inverse") {
        c.domains = {"square", "interval"};
        c.maps = {"shear:0.5", "perturbation:0.05,2", "linear:1.5,0.5,0.5,1.5", "cubic:0.1"};
        c.functions = {};
        c.s = {1.5};
        c.u = {1.0};
        c.rho = {1.0};
    } else if (study == "holder") {
        c.maps = {"shear:0.5", "perturbation:0.05,2"};
        c.functions = {"const", "affine", "sin", "sinpi"};
        c.s = {1.5};
        c.u = {1.0};
        c.rho = {1.0};
    } else if (study == "interpolation") {
        c.domains = {"interval", "square"};
        c.functions = {"sinpi", "sin", "crit"};
        c.s = {2.5};
        c.u = {1.0};
        c.rho = {1.0};
        c.j = {1, 2};
    } else if (study == "extension") {
        c.u = {1.0};
        c.rho = {1.0};
    } else {
        fail(ErrorKind::Config, "unknown study '" + study + "'");
    }
    return c;
}

StudyConfig StudyConfig::parse(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string study = "equivalence";
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key == "study") study = value;
        kv.emplace_back(key, value);
    }
    StudyConfig c = defaults(study);
    for (const auto& [key, v] : kv) {
        if (key == "study") continue;
        else if (key == "domains" || key == "domain") c.domains = split(v, ',');
        else if (key == "maps" || key == "map") c.maps = split(v, ';');
        else if (key == "functions") c.functions = split(v, ',');
        else if (key == "s") c.s = parse_reals(key, v);
        else if (key == "p") c.p = parse_reals(key, v);
        else if (key == "q") c.q = parse_reals(key, v);
        else if (key == "u") c.u = parse_reals(key, v);
        else if (key == "rho") c.rho = parse_reals(key, v);
        else if (key == "resolutions") c.resolutions = parse_ints(key, v);
        else if (key == "resolutions_1d") c.resolutions_1d = parse_ints(key, v);
        else if (key == "j") c.j = parse_ints(key, v);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_real(key, v));
        else if (key == "margin") c.margin = (v == "auto") ? -1.0 : parse_real(key, v);
        else if (key == "drift_tol") c.drift_tol = parse_real(key, v);
        else if (key == "cw") c.cw = parse_real(key, v);
        else if (key == "out_csv") c.out_csv = v;
        else if (key == "out_json") c.out_json = v;
        else if (key == "out_long") c.out_long = v;
        else fail(ErrorKind::Config, "unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

StudyConfig StudyConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::vector<NormSpec> StudyConfig::spec_grid(int d) const {
    std::vector<NormSpec> out;
    for (double s_ : s)
        for (double p_ : p)
            for (double q_ : q)
                for (double u_ : u)
                    for (double r_ : rho) {
                        NormSpec spec{.s = s_, .p = p_, .q = q_, .u = u_, .rho = r_};
                        try {
                            spec.validate(d);
                        } catch (const Error&) {
                            continue;
                        }
                        out.push_back(spec);
                    }
    return out;
}

void StudyConfig::validate() const {
    auto increasing = [](const std::vector<int>& r, const char* key) {
        if (r.empty()) fail(ErrorKind::Config, std::string(key) + " is empty");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i] < 2) fail(ErrorKind::Config, std::string(key) + " must be at least 2");
            if (i > 0 && r[i] <= r[i - 1]) fail(ErrorKind::Config, std::string(key) + " must be strictly increasing");
        }
    };
    increasing(resolutions, "resolutions");
    increasing(resolutions_1d, "resolutions_1d");
    if (domains.empty()) fail(ErrorKind::Config, "no domains");
    if (s.empty() || p.empty() || q.empty() || u.empty() || rho.empty()) fail(ErrorKind::Config, "empty norm index list");
    if (!(drift_tol > 0)) fail(ErrorKind::Config, "drift_tol must be positive");
    if (study == "interpolation")
        for (int jj : j) {
            for (double s_ : s)
                if (jj < 1 || jj > static_cast<int>(std::floor(s_)))
                    fail(ErrorKind::Config, "j = " + std::to_string(jj) + " is outside 1..floor(s)");
        }
    for (const auto& f : functions) suite_function(f, 1, 1.5);
}

// ____________________________________________________________________________
// Reports

bool recompute_pass(const StudyRow& r) {
    if (r.check == "none") return true;
    if (r.check == "finite") return std::isfinite(r.ratio) && r.ratio >= 0;
    if (r.check == "le") return r.ratio <= r.threshold;
    if (r.check == "rel_eq") {
        double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
        return std::abs(r.lhs - r.rhs) <= r.threshold * scale;
    }
    return false;
}

void StudyReport::add(StudyRow row) {
    row.pass = recompute_pass(row);
    rows.push_back(std::move(row));
}

bool StudyReport::all_pass() const {
    return failed_count() == 0;
}

int StudyReport::scored_count() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const StudyRow& r) { return r.scored; }));
}

int StudyReport::failed_count() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const StudyRow& r) { return r.scored && !r.pass; }));
}

// ____________________________________________________________________________
// Equivalence: tl_norm over the (u, rho) grid, ratios against the first (u, rho) pair

StudyReport study_equivalence(const StudyConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StudyReport rep = start(cfg);
    for (const auto& dname : cfg.domains) {
        Domain dom = Domain::by_name(dname);
        const int d = dom.dim();
        auto specs = cfg.spec_grid(d);
        for (int n : cfg.resolutions_for(d)) {
            const double h = 1.0 / n;
            for (const auto& fname : cfg.functions) {
                for (const auto& spec : specs) {
                    // One reference spec per (s, p, q): the first u and rho of the grid.
                    const NormSpec* base = nullptr;
                    for (const auto& b : specs)
                        if (b.s == spec.s && b.p == spec.p && b.q == spec.q) { base = &b; break; }
                    std::string id = dname + "|" + fname + "|" + spec.describe();
                    try {
                        auto f = sample_on(dom, h, suite_function(fname, d, spec.s));
                        TlValue v = tl_norm(f, spec);
                        TlValue vb = (base == &spec) ? v : tl_norm(f, *base);
                        if (base != &spec) {
                            StudyRow r;
                            r.case_id = id;
                            r.function = fname;
                            r.spec = spec.describe();
                            r.map = "vs " + base->describe();
                            r.n = n;
                            r.lhs = v.total;
                            r.rhs = vb.total;
                            if (vb.total == 0.0) {
                                r.kind = "excluded";
                                r.ratio = kNaN;
                                r.note = "zero reference norm";
                            } else {
                                r.kind = "value";
                                r.ratio = v.total / vb.total;
                                r.check = "finite";
                                r.scored = true;
                            }
                            rep.add(r);
                        }
                        // Nested t-ranges: a smaller rho never increases the seminorm.
                        for (const auto& other : specs) {
                            if (other.s != spec.s || other.p != spec.p || other.q != spec.q || other.u != spec.u ||
                                !(other.rho > spec.rho))
                                continue;
                            const double sm = v.seminorm;
                            const double lg = tl_norm(f, other).seminorm;
                            StudyRow r;
                            r.case_id = id + "|mono rho=" + fmt(other.rho);
                            r.kind = "monotone";
                            r.function = fname;
                            r.spec = spec.describe();
                            r.map = "vs rho=" + fmt(other.rho);
                            r.n = n;
                            r.lhs = sm;
                            r.rhs = lg;
                            r.ratio = safe_ratio(sm, lg);
                            r.threshold = 1.0 + 1e-12;
                            r.check = "le";
                            r.scored = true;
                            rep.add(r);
                        }
                    } catch (const Error& e) {
                        rep.add(error_row(id, fname, "", spec.describe(), n, e));
                    }
                }
            }
        }
    }
    add_interval_rows(rep);
    add_drift_rows(rep, cfg.drift_tol, true);
    finish_meta(rep, cfg, t0);
    return rep;
}

// ____________________________________________________________________________
// Composition: ||g o f|| <= margin * C_f (||g|| |grad f|^s + |grad g| ||f||)

StudyReport study_composition(const StudyConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StudyReport rep = start(cfg);
    for (const auto& dname : cfg.domains) {
        Domain dom1 = Domain::by_name(dname);
        const int d = dom1.dim();
        std::vector<std::string> maps{"identity"};
        for (const auto& m : cfg.maps) {
            int md = map_dim(m);
            if ((md == 0 || md == d) && m != "identity") maps.push_back(m);
        }
        for (const auto& mname : maps) {
            MapFamily f = parse_map(mname, d);
            const bool identity = f.kind() == MapFamily::Kind::Identity;
            Domain dom2 = image_domain(dom1, f);
            for (int n : cfg.resolutions_for(d)) {
                const double h = 1.0 / n;
                auto mask1 = sample_on(dom1, h, [](const Point&) { return 0.0; });
                LipschitzBounds lb;
                try {
                    lb = lipschitz_bounds(f, mask1);
                } catch (const Error& e) {
                    rep.add(error_row(dname + "|" + mname, "", mname, "", n, e));
                    continue;
                }
                auto fcomps = map_components(dom1, h, f, false);
                for (const auto& spec : cfg.spec_grid(d)) {
                    const double fnorm = vector_tl_norm(fcomps, spec);
                    const double cf = (1.0 + std::pow(lb.max_inv_grad, d / spec.p)) *
                                      (1.0 + std::pow(lb.max_inv_grad, d) * std::pow(lb.max_grad, d));
                    for (const auto& gname : cfg.functions) {
                        std::string id = dname + "|" + mname + "|" + gname + "|" + spec.describe();
                        try {
                            auto g = sample_on(dom2, h, suite_function(gname, d, spec.s));
                            auto gf = resample_through_map(g, f, dom1.grid(h), dom1.inside_fn(), dom1.name());
                            const double lhs = tl_norm(gf, spec).total;
                            const double gnorm = tl_norm(g, spec).total;
                            const double grad_g = max_magnitude(finite_diff(g, 1));
                            StudyRow r;
                            r.case_id = id;
                            r.function = gname;
                            r.map = mname;
                            r.spec = spec.describe();
                            r.n = n;
                            r.lhs = lhs;
                            r.c_f = cf;
                            r.rhs = cf * (gnorm * std::pow(lb.max_grad, spec.s) + grad_g * fnorm);
                            r.ratio = r.rhs > 0 ? lhs / r.rhs : kNaN;
                            r.kind = (identity || gname == "const") ? "calibration" : "bound";
                            r.scored = r.kind == "bound";
                            r.note = "|grad f|=" + fmt(lb.max_grad) + " |grad f^-1|=" + fmt(lb.max_inv_grad);
                            rep.add(r);
                        } catch (const Error& e) {
                            rep.add(error_row(id, gname, mname, spec.describe(), n, e));
                        }
                    }
                }
            }
        }
    }
    freeze_margin(rep, cfg);
    add_drift_rows(rep, cfg.drift_tol, true, "bound");
    finish_meta(rep, cfg, t0);
    return rep;
}

// ____________________________________________________________________________
// Inverse maps

namespace {

// Hand-derived derivatives of a 1D inverse at y = f(x): 1/f', -f''/f'^3, (3f''^2 - f'f''')/f'^5.
std::array<double, 3> inverse_derivatives_1d(const MapFamily& f, double x) {
    double d1 = f.derivative(0, {1}, {x, 0, 0});
    double d2 = f.derivative(0, {2}, {x, 0, 0});
    double d3 = f.derivative(0, {3}, {x, 0, 0});
    return {1.0 / d1, -d2 / std::pow(d1, 3), (3.0 * d2 * d2 - d1 * d3) / std::pow(d1, 5)};
}

}

StudyReport study_inverse(const StudyConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StudyReport rep = start(cfg);
    for (const auto& dname : cfg.domains) {
        Domain dom1 = Domain::by_name(dname);
        const int d = dom1.dim();
        std::vector<std::string> maps{"identity"};
        for (const auto& m : cfg.maps) {
            int md = map_dim(m);
            if ((md == 0 || md == d) && m != "identity") maps.push_back(m);
        }
        for (const auto& mname : maps) {
            MapFamily f = parse_map(mname, d);
            const bool identity = f.kind() == MapFamily::Kind::Identity;
            Domain dom2 = image_domain(dom1, f);

            if (d == 1 && !identity) {
                // Cofactor/chain-rule expansion against the hand formulas at Newton-inverted points.
                for (int i = 0; i <= 16; ++i) {
                    const double y = dom2.lo()[0] + (dom2.hi()[0] - dom2.lo()[0]) * (i + 0.5) / 17.0;
                    std::string id = dname + "|" + mname + "|eq27 y=" + fmt(y);
                    try {
                        const double x = f.newton_inverse({y, 0, 0}, {y, 0, 0})[0];
                        DerivTable inv = inverse_map_derivatives(f.derivatives({x, 0, 0}, 3), 3);
                        auto want = inverse_derivatives_1d(f, x);
                        for (int o = 1; o <= 3; ++o) {
                            StudyRow r;
                            r.case_id = id + " order=" + std::to_string(o);
                            r.kind = "identity";
                            r.map = mname;
                            r.spec = "order " + std::to_string(o);
                            r.lhs = inv.get(0, {o});
                            r.rhs = want[static_cast<std::size_t>(o - 1)];
                            r.ratio = safe_ratio(std::abs(r.lhs - r.rhs), std::abs(r.rhs));
                            r.threshold = 1e-8;
                            r.check = "rel_eq";
                            r.scored = true;
                            rep.add(r);
                        }
                    } catch (const Error& e) {
                        rep.add(error_row(id, "", mname, "", 0, e));
                    }
                }
            }

            for (int n : cfg.resolutions_for(d)) {
                const double h = 1.0 / n;
                for (const auto& spec : cfg.spec_grid(d)) {
                    std::string id = dname + "|" + mname + "|" + spec.describe();
                    try {
                        auto mask1 = sample_on(dom1, h, [](const Point&) { return 0.0; });
                        LipschitzBounds lb = lipschitz_bounds(f, mask1);
                        const double fnorm = vector_tl_norm(map_components(dom1, h, f, false), spec);
                        const double inorm = vector_tl_norm(map_components(dom2, h, f, true), spec);
                        const int k = spec.k();
                        const double L = lb.max_grad, Li = lb.max_inv_grad;
                        const double shape = std::pow(L, d * k - 2) * std::pow(Li, d * k) *
                                             (1.0 + std::pow(L, d) * std::pow(Li, d)) * fnorm;
                        StudyRow r;
                        r.case_id = id;
                        r.map = mname;
                        r.spec = spec.describe();
                        r.n = n;
                        if (identity) {
                            r.kind = "identity";
                            r.lhs = inorm;
                            r.rhs = fnorm;
                            r.ratio = safe_ratio(inorm, fnorm);
                            r.threshold = 1e-12;
                            r.check = "rel_eq";
                        } else {
                            r.kind = "value";
                            r.lhs = inorm;
                            r.rhs = shape;
                            r.c_f = shape / fnorm;
                            r.ratio = inorm / shape;
                            r.check = "finite";
                        }
                        r.scored = true;
                        rep.add(r);
                    } catch (const Error& e) {
                        rep.add(error_row(id, "", mname, spec.describe(), n, e));
                    }
                }
            }
        }
    }
    add_drift_rows(rep, cfg.drift_tol, true);
    finish_meta(rep, cfg, t0);
    return rep;
}

// ____________________________________________________________________________
// Hölder scale: [g o f]_{C^s} <= margin * C_f ||g||_{C^s}, and f^-1 in C^s

namespace {

// Compositions of k into positive parts.
void compositions(int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (k == 0) {
        out.push_back(cur);
        return;
    }
    for (int a = 1; a <= k; ++a) {
        cur.push_back(a);
        compositions(k - a, cur, out);
        cur.pop_back();
    }
}

// C_f of the term-by-term chain-rule estimate for [g o f]_{C^s}, s = k + sigma:
//   sum over compositions a of k of  L^sigma prod_j N_{a_j} + sum_l H_{a_l} prod_{j != l} N_{a_j},
// with N_a = sup |grad^a f| (Frobenius over the full tensor, operator norm for a = 1)
// and H_a = [grad^a f]_{C^sigma}. Equals 1 at the identity.
double holder_constant(const MapFamily& f, const Domain& dom, double h, double s, std::uint64_t seed) {
    const int k = static_cast<int>(std::floor(s));
    const double sigma = s - k;
    const int d = f.dim();
    auto mask = sample_on(dom, h, [](const Point&) { return 0.0; });
    std::vector<double> N(static_cast<std::size_t>(k + 1), 0.0), H(static_cast<std::size_t>(k + 1), 0.0);
    N[1] = lipschitz_bounds(f, mask).max_grad;
    for (int a = 2; a <= k; ++a)
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask.has(i)) continue;
            double acc = 0.0;
            for (int c = 0; c < d; ++c)
                for (const auto& m : indices_of_order(d, a)) {
                    double v = f.derivative(c, m, mask.grid.point(i));
                    double mult = 1.0;
                    for (int t = 2; t <= a; ++t) mult *= t;
                    acc += mult / static_cast<double>(factorial(m)) * v * v;
                }
            N[static_cast<std::size_t>(a)] = std::max(N[static_cast<std::size_t>(a)], std::sqrt(acc));
        }
    auto comps = map_components(dom, h, f, false);
    for (int a = 1; a <= k; ++a)
        for (const auto& comp : comps)
            H[static_cast<std::size_t>(a)] = std::max(H[static_cast<std::size_t>(a)], holder_seminorm(comp, a + sigma, seed));
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    compositions(k, cur, parts);
    double cf = 0.0;
    for (const auto& alpha : parts) {
        double prod = 1.0;
        for (int a : alpha) prod *= N[static_cast<std::size_t>(a)];
        cf += std::pow(N[1], sigma) * prod;
        for (std::size_t l = 0; l < alpha.size(); ++l) {
            double rest = H[static_cast<std::size_t>(alpha[l])];
            for (std::size_t j = 0; j < alpha.size(); ++j)
                if (j != l) rest *= N[static_cast<std::size_t>(alpha[j])];
            cf += rest;
        }
    }
    return cf;
}

}

StudyReport study_holder(const StudyConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StudyReport rep = start(cfg);
    for (const auto& dname : cfg.domains) {
        Domain dom1 = Domain::by_name(dname);
        const int d = dom1.dim();
        std::vector<std::string> maps{"identity"};
        for (const auto& m : cfg.maps) {
            int md = map_dim(m);
            if ((md == 0 || md == d) && m != "identity") maps.push_back(m);
        }
        for (const auto& mname : maps) {
            MapFamily f = parse_map(mname, d);
            const bool identity = f.kind() == MapFamily::Kind::Identity;
            Domain dom2 = image_domain(dom1, f);
            for (int n : cfg.resolutions_for(d)) {
                const double h = 1.0 / n;
                for (double s : cfg.s) {
                    std::string sdesc = "s=" + fmt(s);
                    std::string mid = dname + "|" + mname + "|" + sdesc;
                    double cf = 0.0;
                    try {
                        cf = holder_constant(f, dom1, h, s, cfg.seed);

                        double isemi = 0.0;
                        for (const auto& comp : map_components(dom2, h, f, true))
                            isemi = std::max(isemi, holder_seminorm(comp, s, cfg.seed));
                        StudyRow r;
                        r.case_id = mid + "|inverse";
                        r.kind = "value";
                        r.map = mname;
                        r.function = "f^-1";
                        r.spec = sdesc;
                        r.n = n;
                        r.lhs = isemi;
                        r.rhs = 1.0;
                        r.ratio = isemi;
                        r.check = "finite";
                        r.scored = true;
                        r.note = "Hölder seminorm of the inverse map";
                        rep.add(r);
                    } catch (const Error& e) {
                        rep.add(error_row(mid, "", mname, sdesc, n, e));
                        continue;
                    }
                    for (const auto& gname : cfg.functions) {
                        std::string id = mid + "|" + gname;
                        try {
                            auto g = sample_on(dom2, h, suite_function(gname, d, s));
                            auto gf = resample_through_map(g, f, dom1.grid(h), dom1.inside_fn(), dom1.name());
                            StudyRow r;
                            r.case_id = id;
                            r.function = gname;
                            r.map = mname;
                            r.spec = sdesc;
                            r.n = n;
                            r.lhs = holder_seminorm(gf, s, cfg.seed);
                            r.c_f = cf;
                            r.rhs = cf * (lp_norm(g, kInfinity) + holder_seminorm(g, s, cfg.seed));
                            r.ratio = r.rhs > 0 ? r.lhs / r.rhs : kNaN;
                            r.kind = (identity || gname == "const") ? "calibration" : "bound";
                            r.scored = r.kind == "bound";
                            rep.add(r);
                        } catch (const Error& e) {
                            rep.add(error_row(id, gname, mname, sdesc, n, e));
                        }
                    }
                }
            }
        }
    }
    freeze_margin(rep, cfg);
    add_drift_rows(rep, cfg.drift_tol, false);
    finish_meta(rep, cfg, t0);
    return rep;
}

// ____________________________________________________________________________
// Interpolation: |grad^j f|_{L^{p(s-1)/(j-1)}} <= C ||f||^{(j-1)/(s-1)} |grad f|_inf^{(s-j)/(s-1)}

namespace {

struct InterpolationTerms {
    double lhs = 0.0, rhs = 0.0;
};

InterpolationTerms interpolation_terms(const SampledFunction& f, const NormSpec& spec, int j) {
    const double s = spec.s;
    const double r = spec.p * (s - 1.0) / (j - 1);
    InterpolationTerms t;
    t.lhs = lp_norm(finite_diff(f, j), r);
    const double fnorm = tl_norm(f, spec).total;
    const double grad = lp_norm(finite_diff(f, 1), kInfinity);
    t.rhs = std::pow(fnorm, (j - 1) / (s - 1.0)) * std::pow(grad, (s - j) / (s - 1.0));
    return t;
}

}

StudyReport study_interpolation(const StudyConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StudyReport rep = start(cfg);
    for (const auto& dname : cfg.domains) {
        Domain dom = Domain::by_name(dname);
        const int d = dom.dim();
        const auto& res = cfg.resolutions_for(d);
        for (const auto& spec : cfg.spec_grid(d)) {
            for (int j : cfg.j) {
                for (const auto& fname : cfg.functions) {
                    std::string id = dname + "|" + fname + "|" + spec.describe() + "|j=" + std::to_string(j);
                    if (j == 1) {
                        StudyRow r;
                        r.case_id = id;
                        r.kind = "excluded";
                        r.function = fname;
                        r.spec = spec.describe();
                        r.ratio = kNaN;
                        r.note = "j = 1: exponent p(s-1)/0 is the L^inf hypothesis itself";
                        rep.add(r);
                        continue;
                    }
                    for (int n : res) {
                        try {
                            auto f = sample_on(dom, 1.0 / n, suite_function(fname, d, spec.s));
                            auto t = interpolation_terms(f, spec, j);
                            StudyRow r;
                            r.case_id = id;
                            r.kind = "value";
                            r.function = fname;
                            r.spec = spec.describe();
                            r.map = "j=" + std::to_string(j);
                            r.n = n;
                            r.lhs = t.lhs;
                            r.rhs = t.rhs;
                            r.ratio = t.lhs / t.rhs;
                            r.check = "finite";
                            r.scored = true;
                            rep.add(r);
                            if (n == res.back()) {
                                // Homogeneity: doubling f leaves the constant unchanged.
                                auto t2 = interpolation_terms(scaled(f, 2.0), spec, j);
                                StudyRow z = r;
                                z.case_id = id + "|scaling";
                                z.kind = "identity";
                                z.lhs = t2.lhs / t2.rhs;
                                z.rhs = r.ratio;
                                z.ratio = safe_ratio(std::abs(z.lhs - z.rhs), z.rhs);
                                z.threshold = 1e-12;
                                z.check = "rel_eq";
                                z.note = "C(2f) vs C(f)";
                                rep.add(z);
                            }
                        } catch (const Error& e) {
                            rep.add(error_row(id, fname, "", spec.describe(), n, e));
                        }
                    }
                }
            }
        }
    }
    add_drift_rows(rep, cfg.drift_tol, true);
    finish_meta(rep, cfg, t0);
    return rep;
}

// ____________________________________________________________________________
// Extension boundedness and the polynomial-projection constants

namespace {

std::vector<std::size_t> cube_points(const Grid& g, const DyadicCube& q) {
    Index lo{0, 0, 0}, hi{0, 0, 0};
    const Point a = q.lo(), b = q.hi();
    for (int i = 0; i < g.d; ++i) {
        lo[i] = std::max(0, static_cast<int>(std::ceil((a[i] - g.lo[i]) / g.h - 0.5)));
        hi[i] = std::min(g.n[i] - 1, static_cast<int>(std::ceil((b[i] - g.lo[i]) / g.h - 0.5)) - 1);
        if (hi[i] < lo[i]) return {};
    }
    std::vector<std::size_t> out;
    Index c = lo;
    while (true) {
        out.push_back(g.index(c));
        int a2 = 0;
        while (a2 < g.d) {
            if (++c[a2] <= hi[a2]) break;
            c[a2] = lo[a2];
            ++a2;
        }
        if (a2 == g.d) break;
    }
    return out;
}

struct ProjectionConstants {
    double stability = 0.0;     // ||P f||_p / sum_j l^j ||grad^j f||_p
    double approximation = 0.0; // ||f - P f||_p / (l^k ||grad^k f - mean||_p)
    int cubes = 0;
};

ProjectionConstants projection_constants(const SampledFunction& f, const WhitneyCovering& cov, int k, double p) {
    std::vector<SampledFunction> grads;
    for (int j = 0; j <= k; ++j) grads.push_back(j == 0 ? f : finite_diff(f, j));
    std::set<int> partners;
    for (int q : cov.members(W3))
        if (cov.partner[static_cast<std::size_t>(q)] >= 0) partners.insert(cov.partner[static_cast<std::size_t>(q)]);
    ProjectionConstants out;
    const double h = f.grid.h;
    for (int q : partners) {
        const DyadicCube& cube = cov.cubes[static_cast<std::size_t>(q)];
        if (cube.side < 4.0 * (k + 2) * h) continue;
        std::vector<std::size_t> pts;
        for (std::size_t i : cube_points(f.grid, cube)) {
            bool ok = true;
            for (const auto& g : grads) ok = ok && g.has(i);
            if (ok) pts.push_back(i);
        }
        if (pts.size() < 4) continue;
        MomentPolynomial P = moment_projection(f, cube, k);
        const std::size_t nc = static_cast<std::size_t>(grads[static_cast<std::size_t>(k)].arity);
        std::vector<double> mean(nc, 0.0);
        for (std::size_t i : pts)
            for (std::size_t c = 0; c < nc; ++c) mean[c] += grads[static_cast<std::size_t>(k)].at(i, static_cast<int>(c));
        for (auto& m : mean) m /= static_cast<double>(pts.size());
        double pn = 0.0, err = 0.0, osc = 0.0;
        std::vector<double> gj(static_cast<std::size_t>(k + 1), 0.0);
        for (std::size_t i : pts) {
            const Point x = f.grid.point(i);
            const double pv = P.eval(x);
            pn += std::pow(std::abs(pv), p);
            err += std::pow(std::abs(f.at(i) - pv), p);
            for (int j = 0; j <= k; ++j) gj[static_cast<std::size_t>(j)] += std::pow(grads[static_cast<std::size_t>(j)].magnitude(i), p);
            double o2 = 0.0;
            for (std::size_t c = 0; c < nc; ++c) {
                double v = grads[static_cast<std::size_t>(k)].at(i, static_cast<int>(c)) - mean[c];
                o2 += v * v;
            }
            osc += std::pow(std::sqrt(o2), p);
        }
        double denom = 0.0;
        for (int j = 0; j <= k; ++j) denom += std::pow(cube.side, j) * std::pow(gj[static_cast<std::size_t>(j)], 1.0 / p);
        if (denom > 0) out.stability = std::max(out.stability, std::pow(pn, 1.0 / p) / denom);
        const double rhs = std::pow(cube.side, k) * std::pow(osc, 1.0 / p);
        if (rhs > 1e-14 * std::max(1.0, std::pow(pn, 1.0 / p)))
            out.approximation = std::max(out.approximation, std::pow(err, 1.0 / p) / rhs);
        ++out.cubes;
    }
    return out;
}

}

StudyReport study_extension(const StudyConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    StudyReport rep = start(cfg);
    nlohmann::json coverings = nlohmann::json::array();
    for (const auto& dname : cfg.domains) {
        Domain dom = Domain::by_name(dname);
        const int d = dom.dim();
        auto specs = cfg.spec_grid(d);
        std::set<int> orders;
        for (const auto& sp : specs) orders.insert(sp.k());
        for (int n : cfg.resolutions_for(d)) {
            const double h = 1.0 / n;
            WhitneyCovering cov;
            try {
                cov = build_whitney(dom, cfg.cw, extension_generations(dom, h));
            } catch (const Error& e) {
                rep.add(error_row(dname + "|covering", "", "", "", n, e));
                continue;
            }
            auto bumps = build_bumps(cov);
            auto pairs = sample_pairs(cov, 200, cov.delta, cfg.seed);
            auto unif = check_uniformity(cov, pairs, cov.delta);
            coverings.push_back({{"domain", dname}, {"n", n}, {"hash", cov.hash()}, {"ell0", cov.ell0},
                                 {"cw", cov.cw}, {"max_gen", cov.max_gen}, {"dropped", cov.dropped},
                                 {"cubes", cov.cubes.size()}, {"eps_empirical", unif.eps_empirical}});
            for (const auto& fname : cfg.functions) {
                for (int k : orders) {
                    std::string kid = dname + "|" + fname + "|k=" + std::to_string(k);
                    // Samples and extensions per s; only crit actually depends on s.
                    std::map<double, std::pair<SampledFunction, Extension>> cache;
                    auto get = [&](double s) -> std::pair<SampledFunction, Extension>& {
                        const double key = fname == "crit" ? s : 0.0;
                        auto it = cache.find(key);
                        if (it == cache.end()) {
                            auto f = sample_on(dom, h, suite_function(fname, d, s));
                            auto ext = extend_lambdak(f, k, dom, cov, bumps);
                            it = cache.emplace(key, std::make_pair(std::move(f), std::move(ext))).first;
                        }
                        return it->second;
                    };
                    const NormSpec* first = nullptr;
                    for (const auto& spec : specs) {
                        if (spec.k() != k) continue;
                        if (!first) first = &spec;
                        std::string id = dname + "|" + fname + "|" + spec.describe();
                        StudyRow r;
                        r.case_id = id;
                        r.function = fname;
                        r.spec = spec.describe();
                        r.map = "lambda_" + std::to_string(k);
                        r.n = n;
                        try {
                            auto& [f, ext] = get(spec.s);
                            r.lhs = tl_norm(ext.values, spec).total;
                            r.rhs = tl_norm(f, spec).total;
                            if (r.rhs == 0.0) {
                                r.kind = "excluded";
                                r.ratio = kNaN;
                                r.note = "zero norm";
                            } else {
                                r.kind = "value";
                                r.ratio = r.lhs / r.rhs;
                                r.check = "finite";
                                r.scored = true;
                                r.note = "dropped=" + std::to_string(ext.dropped_terms);
                            }
                            rep.add(r);
                        } catch (const Error& e) {
                            rep.add(error_row(id, fname, r.map, spec.describe(), n, e));
                        }
                    }
                    if (!first) continue;
                    try {
                        auto pc = projection_constants(get(first->s).first, cov, k, first->p);
                        for (int which = 0; which < 2; ++which) {
                            StudyRow r;
                            r.case_id = kid + (which == 0 ? "|projection stability" : "|projection approximation");
                            r.kind = "projection";
                            r.function = fname;
                            r.map = "P^" + std::to_string(k);
                            r.spec = "p=" + fmt(first->p);
                            r.n = n;
                            r.ratio = which == 0 ? pc.stability : pc.approximation;
                            r.lhs = r.ratio;
                            r.rhs = 1.0;
                            r.check = "finite";
                            r.scored = pc.cubes > 0 && r.ratio > 0;
                            r.note = std::to_string(pc.cubes) + " cubes";
                            rep.add(r);
                        }
                    } catch (const Error& e) {
                        rep.add(error_row(kid, fname, "", "", n, e));
                    }
                }
            }
        }
    }
    rep.meta["coverings"] = coverings;
    add_drift_rows(rep, cfg.drift_tol, true);
    add_drift_rows(rep, cfg.drift_tol, false, "projection");
    finish_meta(rep, cfg, t0);
    return rep;
}

StudyReport run_study(const StudyConfig& cfg) {
    if (cfg.study == "equivalence") return study_equivalence(cfg);
    if (cfg.study == "composition") return study_composition(cfg);
    if (cfg.study == "inverse") return study_inverse(cfg);
    if (cfg.study == "holder") return study_holder(cfg);
    if (cfg.study == "interpolation") return study_interpolation(cfg);
    if (cfg.study == "extension") return study_extension(cfg);
    fail(ErrorKind::Config, "unknown study '" + cfg.study + "'");
}

// ____________________________________________________________________________
// Emission

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{"study", "case", "kind", "function", "map", "spec", "n", "lhs", "rhs",
                                               "ratio", "c_f", "threshold", "check", "scored", "pass", "note"};
    return cols;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}

std::string report_csv(const StudyReport& r) {
    std::ostringstream o;
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
    o << "\n";
    for (const auto& row : r.rows) {
        o << csv_field(r.study) << ',' << csv_field(row.case_id) << ',' << row.kind << ',' << csv_field(row.function) << ','
          << csv_field(row.map) << ',' << csv_field(row.spec) << ',' << row.n << ',' << fmt(row.lhs) << ',' << fmt(row.rhs)
          << ',' << fmt(row.ratio) << ',' << fmt(row.c_f) << ',' << fmt(row.threshold) << ',' << row.check << ','
          << (row.scored ? 1 : 0) << ',' << (row.pass ? 1 : 0) << ',' << csv_field(row.note) << "\n";
    }
    return o.str();
}

std::string report_long_csv(const StudyReport& r) {
    std::ostringstream o;
    o << "study,case,series,n,value\n";
    for (const auto& row : r.rows) {
        if (row.n == 0) continue;
        for (auto [series, v] : {std::pair<const char*, double>{"lhs", row.lhs}, {"rhs", row.rhs}, {"ratio", row.ratio}})
            o << csv_field(r.study) << ',' << csv_field(row.case_id) << ',' << series << ',' << row.n << ',' << fmt(v) << "\n";
    }
    return o.str();
}

nlohmann::json report_to_json(const StudyReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"case", row.case_id}, {"kind", row.kind}, {"function", row.function}, {"map", row.map},
                        {"spec", row.spec}, {"n", row.n}, {"lhs", num(row.lhs)}, {"rhs", num(row.rhs)},
                        {"ratio", num(row.ratio)}, {"c_f", num(row.c_f)}, {"threshold", num(row.threshold)},
                        {"check", row.check}, {"scored", row.scored}, {"pass", row.pass}, {"note", row.note}});
    }
    return {{"study", r.study}, {"seed", r.seed}, {"meta", r.meta}, {"columns", report_columns()}, {"rows", rows},
            {"all_pass", r.all_pass()}};
}

StudyReport report_from_json(const nlohmann::json& j) {
    StudyReport r;
    try {
        r.study = j.at("study").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.meta = j.at("meta");
        for (const auto& x : j.at("rows")) {
            StudyRow row;
            row.case_id = x.at("case").get<std::string>();
            row.kind = x.at("kind").get<std::string>();
            row.function = x.at("function").get<std::string>();
            row.map = x.at("map").get<std::string>();
            row.spec = x.at("spec").get<std::string>();
            row.n = x.at("n").get<int>();
            row.lhs = from_num(x.at("lhs"));
            row.rhs = from_num(x.at("rhs"));
            row.ratio = from_num(x.at("ratio"));
            row.c_f = from_num(x.at("c_f"));
            row.threshold = from_num(x.at("threshold"));
            row.check = x.at("check").get<std::string>();
            row.scored = x.at("scored").get<bool>();
            row.pass = x.at("pass").get<bool>();
            row.note = x.at("note").get<std::string>();
            r.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Io, std::string("malformed report: ") + e.what());
    }
    return r;
}

void emit_report(const StudyReport& r, const std::string& csv_path, const std::string& json_path,
                 const std::string& long_path) {
    auto write = [](const std::string& path, const std::string& text) {
        if (path.empty()) return;
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorKind::Io, "cannot write " + path);
        out << text;
        if (!out) fail(ErrorKind::Io, "write failed for " + path);
    };
    write(csv_path, report_csv(r));
    write(json_path, report_to_json(r).dump(1) + "\n");
    write(long_path, report_long_csv(r));
}

}

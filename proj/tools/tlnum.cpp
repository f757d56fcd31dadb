#include "tlnum/calculus.hpp"
#include "tlnum/experiments.hpp"
#include "tlnum/extension.hpp"
#include "tlnum/geometry.hpp"
#include "tlnum/io.hpp"
#include "tlnum/spaces.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace tln;
using nlohmann::json;

namespace {

const char* family_tag(const WhitneyCovering& cov, int i) {
    if (cov.is(i, W4)) return "W4";
    if (cov.is(i, W3)) return "W3";
    if (cov.is(i, W2)) return "W2";
    if (cov.is(i, W1)) return "W1";
    return "W0";
}

MultiIndex parse_index(const std::string& s) {
    MultiIndex out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            fail(ErrorKind::Config, "bad multiindex '" + s + "'");
        }
    }
    return out;
}

double parse_step(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return std::stod(s);
        return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
        fail(ErrorKind::Config, "bad grid step '" + s + "'");
    }
}

double parse_index_value(const std::string& s) {
    if (s == "inf") return kInfinity;
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        fail(ErrorKind::Config, "bad norm index '" + s + "'");
    }
}

int cmd_whitney(const std::string& domain, double cw, int max_gen, const std::string& out_path) {
    Domain dom = Domain::by_name(domain);
    WhitneyCovering cov = build_whitney(dom, cw, max_gen);
    std::ofstream out(out_path);
    if (!out) fail(ErrorKind::Io, "cannot write " + out_path);
    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
        const auto& q = cov.cubes[i];
        std::vector<int> idx(q.idx.begin(), q.idx.begin() + q.d);
        std::vector<double> center(q.center.begin(), q.center.begin() + q.d);
        int partner = cov.partner[i];
        json rec{{"generation", q.gen}, {"lattice", idx}, {"side", q.side}, {"center", center},
                 {"family", family_tag(cov, static_cast<int>(i))}};
        if (partner >= 0) {
            const auto& p = cov.cubes[static_cast<std::size_t>(partner)];
            rec["partner"] = {{"generation", p.gen}, {"lattice", std::vector<int>(p.idx.begin(), p.idx.begin() + p.d)}};
        } else {
            rec["partner"] = nullptr;
        }
        out << rec.dump() << "\n";
    }
    json summary{{"domain", dom.name()}, {"cubes", cov.cubes.size()},        {"hash", cov.hash()},
                 {"ell0", cov.ell0},      {"uncovered", cov.uncovered_measure}, {"dropped", cov.dropped}};
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_terms(const std::string& order, int d, int D) {
    json out = json::array();
    for (const auto& t : faa_terms(parse_index(order), d, D))
        out.push_back({{"constant", t.constant}, {"outer", t.outer}, {"inner", t.inner}, {"assignment", t.assignment}});
    std::cout << out.dump(1) << "\n";
    return 0;
}

int cmd_sample(const std::string& domain, const std::string& fn, const std::string& step, double s, const std::string& out_path) {
    Domain dom = Domain::by_name(domain);
    auto f = sample_scalar(dom.grid(parse_step(step)), dom.inside_fn(), suite_function(fn, dom.dim(), s), dom.name());
    write_sampled(out_path, f, json{{"function", fn}, {"s", s}});
    return 0;
}

int cmd_norm(const std::string& fn, double s, double p, double q, double u, double rho) {
    SampledFunction f = read_sampled(fn);
    NormSpec spec{.s = s, .p = p, .q = q, .u = u, .rho = rho};
    spec.validate(f.grid.d);
    TlValue v = tl_norm(f, spec);
    auto n = [](double x) { return std::isfinite(x) ? json(x) : json("inf"); };
    json out{{"spec", {{"s", s}, {"p", p}, {"q", n(q)}, {"u", n(u)}, {"rho", rho}}},
             {"norm", v.total},
             {"wkp", v.wkp},
             {"seminorm", v.seminorm}};
    std::cout << out.dump(1) << "\n";
    return 0;
}

int cmd_extend(const std::string& fn, int k, const std::string& domain, double cw, const std::string& out_path) {
    SampledFunction f = read_sampled(fn);
    Domain dom = Domain::by_name(domain);
    if (f.grid.d != dom.dim()) fail(ErrorKind::Config, "sample dimension does not match the domain");
    WhitneyCovering cov = build_whitney(dom, cw, extension_generations(dom, f.grid.h));
    auto bumps = build_bumps(cov);
    Extension ext = extend_lambdak(f, k, dom, cov, bumps);
    json prov{{"covering_hash", cov.hash()}, {"dropped", ext.dropped_terms}, {"ell0", cov.ell0}, {"k", k}, {"cw", cw}};
    write_sampled(out_path, ext.values, prov);
    std::cout << prov.dump() << "\n";
    return 0;
}

int cmd_verify(const std::string& study, const std::string& config_path) {
    StudyConfig cfg;
    if (config_path.empty()) {
        cfg = StudyConfig::defaults(study);
    } else {
        std::ifstream in(config_path);
        if (!in) fail(ErrorKind::Io, "cannot read config " + config_path);
        std::stringstream ss;
        ss << "study = " << study << "\n" << in.rdbuf();
        cfg = StudyConfig::parse(ss.str());
        if (cfg.study != study) fail(ErrorKind::Config, "config names study '" + cfg.study + "' but --study is '" + study + "'");
    }
    StudyReport rep = run_study(cfg);
    emit_report(rep, cfg.out_csv, cfg.out_json, cfg.out_long);
    for (const auto& r : rep.rows)
        if (r.scored && !r.pass)
            std::cerr << "FAIL " << r.kind << " " << r.case_id << (r.n ? " n=" + std::to_string(r.n) : std::string())
                      << " ratio=" << r.ratio << " threshold=" << r.threshold << (r.note.empty() ? "" : " (" + r.note + ")")
                      << "\n";
    std::cout << json{{"study", rep.study}, {"rows", rep.rows.size()}, {"scored", rep.scored_count()},
                      {"failed", rep.failed_count()}, {"wall_seconds", rep.meta.value("wall_seconds", 0.0)}}
                     .dump()
              << "\n";
    return rep.all_pass() ? 0 : 1;
}

}

int main(int argc, char** argv) {
    CLI::App app{"tlnum: Whitney coverings, difference norms and extension operators on sampled functions.\n"
                 "Worker threads: TLNUM_WORKERS (default: hardware concurrency)."};
    app.require_subcommand(1);

    std::string domain = "square", out, order, fn, config, study, step = "1/64", fname = "sin";
    double cw = 3.0, s = 0.5, p = 2, rho = 1, sfun = 1.5;
    std::string q = "2", u = "2";
    int max_gen = 8, d = 1, D = 1, k = 0;

    auto* w = app.add_subcommand("whitney", "Build a Whitney covering and write it as JSON lines");
    w->add_option("--domain", domain, "Built-in domain or sdf sample file")->required();
    w->add_option("--cw", cw, "Whitney constant")->capture_default_str();
    w->add_option("--max-gen", max_gen, "Finest dyadic generation")->capture_default_str();
    w->add_option("--out", out, "Output path")->required();

    auto* t = app.add_subcommand("terms", "Dump the Faa di Bruno terms of D^k (g o f)");
    t->add_option("--order", order, "Multiindex k, comma separated")->required();
    t->add_option("--d", d, "Dimension of the domain of f")->capture_default_str();
    t->add_option("--D", D, "Dimension of the target of f")->capture_default_str();

    auto* sm = app.add_subcommand("sample", "Sample a built-in test function on a domain grid");
    sm->add_option("--domain", domain, "Domain")->capture_default_str();
    sm->add_option("--fn", fname, "zero, const, affine, sin, sinpi, abs03, abs08, crit")->capture_default_str();
    sm->add_option("--step", step, "Grid step, e.g. 1/128")->capture_default_str();
    sm->add_option("--s", sfun, "Smoothness parameter of crit")->capture_default_str();
    sm->add_option("--out", out, "Output path")->required();

    auto* n = app.add_subcommand("norm", "Triebel-Lizorkin type difference norm of a sampled function");
    n->add_option("--fn", fn, "Sampled function file")->required();
    n->add_option("--s", s)->required();
    n->add_option("--p", p)->capture_default_str();
    n->add_option("--q", q, "number or inf")->capture_default_str();
    n->add_option("--u", u, "number or inf")->capture_default_str();
    n->add_option("--rho", rho)->capture_default_str();

    auto* e = app.add_subcommand("extend", "Extend a sampled function beyond its domain");
    e->add_option("--fn", fn, "Sampled function file")->required();
    e->add_option("--k", k, "Polynomial order of the extension")->capture_default_str();
    e->add_option("--domain", domain, "Domain the samples live on")->required();
    e->add_option("--cw", cw, "Whitney constant")->capture_default_str();
    e->add_option("--out", out, "Output path")->required();

    auto* v = app.add_subcommand("verify", "Run a verification study; exit code 0 iff every scored row passes");
    v->add_option("--study", study, "equivalence, composition, inverse, holder, interpolation or extension")->required();
    v->add_option("--config", config, "key = value config file (defaults when omitted)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*w) return cmd_whitney(domain, cw, max_gen, out);
        if (*t) return cmd_terms(order, d, D);
        if (*sm) return cmd_sample(domain, fname, step, sfun, out);
        if (*n) return cmd_norm(fn, s, p, parse_index_value(q), parse_index_value(u), rho);
        if (*e) return cmd_extend(fn, k, domain, cw, out);
        if (*v) return cmd_verify(study, config);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}

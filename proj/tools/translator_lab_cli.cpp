// translator-lab: command-line front end of the translating-graph laboratory.
// Talks to the core exclusively through the C API in translator_lab.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "translator_lab.h"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerdictFalse = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 42;
    int nx = 0, ny = 0;  // 0 = keep config/default
    double c_speed = 0;  // 0 = keep config/default
    double tol = 0;
};

[[noreturn]] void fail_usage(const std::string& msg) {
    std::fprintf(stderr, "translator-lab: %s\n", msg.c_str());
    std::exit(kExitUsage);
}

void check(tl_status st, const std::string& what) {
    if (st != TL_OK) fail_usage(what + ": " + tl_last_error());
}

void write_atomic(const std::string& path, const std::string& body) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) fail_usage("cannot open '" + tmp + "' for writing");
        os << body;
    }
    std::filesystem::rename(tmp, path);
}

ordered_json load_config(const Options& opt, const std::vector<std::string>& allowed) {
    ordered_json cfg = ordered_json::object();
    if (!opt.config.empty()) {
        std::ifstream is(opt.config);
        if (!is) fail_usage("cannot open config '" + opt.config + "'");
        try {
            cfg = ordered_json::parse(is);
        } catch (const std::exception& e) {
            fail_usage(std::string("config parse error: ") + e.what());
        }
    }
    if (!cfg.is_object()) fail_usage("config must be a JSON object");
    for (auto& [key, value] : cfg.items()) {
        (void)value;
        bool ok = false;
        for (auto& a : allowed) ok = ok || key == a;
        if (!ok) fail_usage("unknown config key '" + key + "'");
    }
    return cfg;
}

void write_meta(const Options& opt, const std::string& subcommand, const ordered_json& cfg) {
    ordered_json meta;
    meta["subcommand"] = subcommand;
    meta["seed"] = opt.seed;
    meta["config"] = cfg;
    meta["timestamp"] = static_cast<long long>(std::time(nullptr));
    write_atomic((std::filesystem::path(opt.out) / "meta.json").string(), meta.dump(2) + "\n");
}

struct DomainHandle {
    tl_domain* d = nullptr;
    ~DomainHandle() { tl_domain_free(d); }
};
struct FieldHandle {
    tl_field* f = nullptr;
    ~FieldHandle() { tl_field_free(f); }
};
struct ExactHandle {
    tl_exact* e = nullptr;
    ~ExactHandle() { tl_exact_free(e); }
};
struct GeomHandle {
    tl_geometry* g = nullptr;
    ~GeomHandle() { tl_geometry_free(g); }
};

// domain spec: {"shape":"rect"|"slab"|"disk"|"annulus", ...extents}
void make_domain(const ordered_json& spec, int nx_cli, int ny_cli, DomainHandle& out) {
    std::string shape = spec.value("shape", std::string("rect"));
    int nx = nx_cli > 0 ? nx_cli : spec.value("nx", 65);
    int ny = ny_cli > 0 ? ny_cli : spec.value("ny", nx);
    if (shape == "rect") {
        check(tl_domain_rect(spec.value("x0", -1.0), spec.value("x1", 1.0), spec.value("y0", -1.0),
                             spec.value("y1", 1.0), nx, ny, &out.d),
              "domain");
    } else if (shape == "slab") {
        double x0 = spec.value("x0", -1.3), x1 = spec.value("x1", 1.3);
        double hy = spec.value("hy", (x1 - x0) / (nx - 1));
        check(tl_domain_slab(x0, x1, nx, spec.value("y0", 0.0), ny, hy, &out.d), "domain");
    } else if (shape == "disk") {
        check(tl_domain_disk(spec.value("radius", 1.0), nx, &out.d), "domain");
    } else if (shape == "annulus") {
        check(tl_domain_annulus(spec.value("r_in", 0.2), spec.value("r_out", 1.0), nx, &out.d),
              "domain");
    } else {
        fail_usage("unknown domain shape '" + shape + "'");
    }
}

int run_exact(const Options& opt, const std::string& kind) {
    ordered_json cfg = load_config(opt, {"kind", "C", "b", "r_max", "tol", "nx", "ny", "inset",
                                         "radius"});
    std::string k = kind.empty() ? cfg.value("kind", std::string("grim")) : kind;
    double C = opt.c_speed > 0 ? opt.c_speed : cfg.value("C", 1.0);
    double b = cfg.value("b", 1.0);
    int nx = opt.nx > 0 ? opt.nx : cfg.value("nx", 129);
    int ny = opt.ny > 0 ? opt.ny : cfg.value("ny", nx);
    double inset = cfg.value("inset", 0.2);

    ExactHandle ex;
    DomainHandle dom;
    const double pi = 3.14159265358979323846;
    if (k == "grim") {
        check(tl_exact_grim_reaper(C, &ex.e), "exact");
        double hw = pi / (2 * C);
        check(tl_domain_rect(-hw + inset, hw - inset, 0, 1, nx, ny, &dom.d), "domain");
    } else if (k == "tilted") {
        check(tl_exact_tilted_grim_reaper(b, C, &ex.e), "exact");
        double hw = std::sqrt(1 + b * b) * pi / (2 * C);
        check(tl_domain_rect(-hw + inset, hw - inset, 0, 1, nx, ny, &dom.d), "domain");
    } else if (k == "bowl") {
        check(tl_exact_bowl(C, cfg.value("r_max", 8.0), cfg.value("tol", 1e-10), &ex.e), "exact");
        check(tl_domain_disk(cfg.value("radius", 2.0), nx | 1, &dom.d), "domain");
    } else {
        fail_usage("exact: kind must be grim | tilted | bowl");
    }

    FieldHandle u;
    check(tl_field_sample(dom.d, ex.e, &u.f), "sample");
    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    check(tl_field_save(u.f, (outdir / "field.txt").string().c_str()), "field save");

    FieldHandle R;
    check(tl_residual(u.f, C, &R.f), "residual");
    double sup = 0, l2 = 0;
    check(tl_field_norms(R.f, &sup, &l2), "norms");

    GeomHandle g;
    check(tl_geometry_compute(u.f, &g.g), "geometry");
    check(tl_geometry_csv(g.g, (outdir / "geometry.csv").string().c_str()), "geometry csv");

    // residual profile along the middle row
    const tl_domain* dd = tl_field_domain(u.f);
    int mj = tl_domain_ny(dd) / 2;
    std::string csv = "i,residual\n";
    for (int i = 0; i < tl_domain_nx(dd); ++i) {
        if (tl_domain_node_class(dd, i, mj) != 0) continue;
        double v;
        check(tl_field_get(R.f, i, mj, &v), "residual get");
        char line[64];
        std::snprintf(line, sizeof line, "%d,%.17g\n", i, v);
        csv += line;
    }
    write_atomic((outdir / "residual.csv").string(), csv);

    ordered_json rep;
    rep["kind"] = k;
    rep["C"] = C;
    rep["residual_sup"] = sup;
    rep["residual_weighted_l2"] = l2;
    write_atomic((outdir / "exact_report.json").string(), rep.dump(2) + "\n");
    write_meta(opt, "exact", cfg);
    std::printf("exact %s: residual sup %.3e, field + geometry + residual written to %s\n",
                k.c_str(), sup, opt.out.c_str());
    return kExitOk;
}

void boundary_from_config(const DomainHandle& dom, const ordered_json& bc, FieldHandle& out) {
    check(tl_field_boundary(dom.d, bc.dump().c_str(), &out.f), "boundary data");
}

int run_solve(const Options& opt) {
    ordered_json cfg = load_config(
        opt, {"domain", "C", "bc", "nx", "ny", "newton_tol", "max_newton", "continuation"});
    DomainHandle dom;
    make_domain(cfg.value("domain", ordered_json::object()), opt.nx, opt.ny, dom);
    FieldHandle bc;
    boundary_from_config(dom, cfg.value("bc", ordered_json({{"kind", "zero"}})), bc);

    tl_solver_config sc;
    tl_solver_config_default(&sc);
    sc.C = opt.c_speed > 0 ? opt.c_speed : cfg.value("C", 1.0);
    sc.newton_tol = opt.tol > 0 ? opt.tol : cfg.value("newton_tol", 1e-10);
    sc.max_newton = cfg.value("max_newton", 30);
    sc.continuation = cfg.value("continuation", true) ? 1 : 0;

    tl_solve_report* rep = nullptr;
    tl_status st = tl_newton_solve(dom.d, bc.f, &sc, &rep);
    if (st != TL_OK && st != TL_ERR_NO_CONVERGENCE)
        fail_usage(std::string("solve: ") + tl_last_error());
    std::unique_ptr<tl_solve_report, decltype(&tl_solve_report_free)> rep_owner(
        rep, &tl_solve_report_free);

    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    write_atomic((outdir / "solve_report.json").string(), std::string(tl_solve_json(rep)) + "\n");
    FieldHandle u;
    check(tl_solve_field(rep, &u.f), "solve field");
    check(tl_field_save(u.f, (outdir / "solution.txt").string().c_str()), "field save");
    write_meta(opt, "solve", cfg);
    std::printf("solve: converged=%d iterations=%d -> %s\n", tl_solve_converged(rep),
                tl_solve_iterations(rep), opt.out.c_str());
    return tl_solve_converged(rep) ? kExitOk : kExitVerdictFalse;
}

int run_evolve(const Options& opt) {
    ordered_json cfg =
        load_config(opt, {"domain", "C", "bc", "nx", "ny", "T", "dt_safety", "frame", "source"});
    DomainHandle dom;
    make_domain(cfg.value("domain", ordered_json::object()), opt.nx, opt.ny, dom);
    double C = opt.c_speed > 0 ? opt.c_speed : cfg.value("C", 1.0);

    FieldHandle u0;
    std::string source = cfg.value("source", std::string("solve"));
    if (source == "solve") {
        FieldHandle bc;
        boundary_from_config(dom, cfg.value("bc", ordered_json({{"kind", "zero"}})), bc);
        tl_solver_config sc;
        tl_solver_config_default(&sc);
        sc.C = C;
        tl_solve_report* rep = nullptr;
        tl_status st = tl_newton_solve(dom.d, bc.f, &sc, &rep);
        if (st != TL_OK && st != TL_ERR_NO_CONVERGENCE)
            fail_usage(std::string("evolve: ") + tl_last_error());
        check(tl_solve_field(rep, &u0.f), "solve field");
        tl_solve_report_free(rep);
    } else {
        fail_usage("evolve: source must be 'solve'");
    }

    double T = cfg.value("T", 0.5);
    int frame = cfg.value("frame", std::string("lab")) == "moving" ? 1 : 0;
    FieldHandle uT;
    check(tl_evolve(u0.f, C, T, cfg.value("dt_safety", 0.2), frame, &uT.f), "evolve");

    // traveling-wave deviation || u(T) - u(0) - C T ||_inf (lab frame)
    const tl_domain* dd = tl_field_domain(u0.f);
    double dev = 0;
    for (int j = 0; j < tl_domain_ny(dd); ++j)
        for (int i = 0; i < tl_domain_nx(dd); ++i) {
            if (tl_domain_node_class(dd, i, j) == 2) continue;
            double a, b2;
            check(tl_field_get(u0.f, i, j, &a), "get");
            check(tl_field_get(uT.f, i, j, &b2), "get");
            double shift = frame == 0 ? C * T : 0.0;
            dev = std::max(dev, std::abs(b2 - a - shift));
        }

    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    check(tl_field_save(uT.f, (outdir / "evolved.txt").string().c_str()), "field save");
    ordered_json rep;
    rep["T"] = T;
    rep["frame"] = frame == 0 ? "lab" : "moving";
    rep["traveling_wave_deviation"] = dev;
    rep["verdict"] = dev <= 1e-2;
    write_atomic((outdir / "evolve_report.json").string(), rep.dump(2) + "\n");
    write_meta(opt, "evolve", cfg);
    std::printf("evolve: traveling-wave deviation %.3e (<= 1e-2: %s)\n", dev,
                dev <= 1e-2 ? "yes" : "NO");
    return dev <= 1e-2 ? kExitOk : kExitVerdictFalse;
}

int run_stability(const Options& opt) {
    ordered_json cfg = load_config(
        opt, {"domain", "C", "bc", "nx", "ny", "source", "field", "collar", "eig_tol", "exact"});
    double C = opt.c_speed > 0 ? opt.c_speed : cfg.value("C", 1.0);
    FieldHandle u;
    std::string source = cfg.value("source", std::string("solve"));
    if (source == "file") {
        check(tl_field_load(cfg.value("field", std::string("field.txt")).c_str(), &u.f),
              "field load");
    } else if (source == "exact") {
        DomainHandle dom;
        make_domain(cfg.value("domain", ordered_json::object()), opt.nx, opt.ny, dom);
        auto ex = cfg.value("exact", ordered_json::object());
        ExactHandle e;
        std::string kind = ex.value("kind", std::string("grim"));
        if (kind == "grim")
            check(tl_exact_grim_reaper(ex.value("C", C), &e.e), "exact");
        else if (kind == "tilted")
            check(tl_exact_tilted_grim_reaper(ex.value("b", 1.0), ex.value("C", C), &e.e), "exact");
        else
            check(tl_exact_bowl(ex.value("C", C), ex.value("r_max", 8.0), ex.value("tol", 1e-10),
                                &e.e),
                  "exact");
        check(tl_field_sample(dom.d, e.e, &u.f), "sample");
    } else if (source == "solve") {
        DomainHandle dom;
        make_domain(cfg.value("domain", ordered_json::object()), opt.nx, opt.ny, dom);
        FieldHandle bc;
        boundary_from_config(dom, cfg.value("bc", ordered_json({{"kind", "zero"}})), bc);
        tl_solver_config sc;
        tl_solver_config_default(&sc);
        sc.C = C;
        tl_solve_report* rep = nullptr;
        tl_status st = tl_newton_solve(dom.d, bc.f, &sc, &rep);
        if (st != TL_OK && st != TL_ERR_NO_CONVERGENCE)
            fail_usage(std::string("stability: ") + tl_last_error());
        check(tl_solve_field(rep, &u.f), "solve field");
        tl_solve_report_free(rep);
    } else {
        fail_usage("stability: source must be file | exact | solve");
    }

    tl_stability_report* rep = nullptr;
    check(tl_stability_analyze(u.f, C, cfg.value("collar", 2),
                               opt.tol > 0 ? opt.tol : cfg.value("eig_tol", 1e-6), opt.seed, &rep),
          "stability");
    std::unique_ptr<tl_stability_report, decltype(&tl_stability_report_free)> rep_owner(
        rep, &tl_stability_report_free);
    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    write_atomic((outdir / "stability_report.json").string(),
                 std::string(tl_stability_json(rep)) + "\n");
    write_meta(opt, "stability", cfg);
    bool ok = tl_stability_is_translator(rep) && tl_stability_top_eigenvalue(rep) <= 1e-8 &&
              tl_stability_identity_gap(rep) <= 1e-6;
    std::printf("stability: translator=%d top_eigenvalue=%.3e identity_gap=%.3e -> %s\n",
                tl_stability_is_translator(rep), tl_stability_top_eigenvalue(rep),
                tl_stability_identity_gap(rep), ok ? "ok" : "VERDICT FALSE");
    return ok ? kExitOk : kExitVerdictFalse;
}

int run_metric_check(const Options& opt) {
    ordered_json cfg = load_config(opt, {"points", "pairs", "nx"});
    int nx = opt.nx > 0 ? opt.nx : cfg.value("nx", 129);
    bool ok = true;
    ordered_json rows = ordered_json::array();
    std::uint64_t s = opt.seed ? opt.seed : 1;
    auto next = [&s]() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) / 9007199254740992.0;
    };
    int npts = cfg.value("points", 10);
    for (int k = 0; k < npts; ++k) {
        double x = 2 * next() - 1, y = 2 * next() - 1, z = 2 * next() - 1;
        double K12, K13, K23;
        check(tl_sectional_curvature(0, x, y, z, 0, 1, &K12), "K12");
        check(tl_sectional_curvature(0, x, y, z, 0, 2, &K13), "K13");
        check(tl_sectional_curvature(0, x, y, z, 1, 2, &K23), "K23");
        double expect = -0.25 * std::exp(-z);
        bool pass =
            std::abs(K12 - expect) <= 1e-6 && std::abs(K13) <= 1e-6 && std::abs(K23) <= 1e-6;
        ok = ok && pass;
        rows.push_back({{"point", {x, y, z}},
                        {"K12", K12},
                        {"K12_expected", expect},
                        {"K13", K13},
                        {"K23", K23},
                        {"pass", pass}});
    }

    // distance sandwich on a grim-reaper patch
    ExactHandle e;
    check(tl_exact_grim_reaper(1.0, &e.e), "exact");
    DomainHandle dom;
    check(tl_domain_rect(-1.2, 1.2, 0, 0.6, nx, (nx - 1) / 4 + 1, &dom.d), "domain");
    FieldHandle u;
    check(tl_field_sample(dom.d, e.e, &u.f), "sample");
    GeomHandle g;
    check(tl_geometry_compute(u.f, &g.g), "geometry");
    int pairs = cfg.value("pairs", 100), checked = 0, sandwich_fail = 0;
    int NX = tl_domain_nx(dom.d), NY = tl_domain_ny(dom.d);
    while (checked < pairs) {
        int pi = 2 + static_cast<int>(next() * (NX - 4));
        int pj = 2 + static_cast<int>(next() * (NY - 4));
        int qi = 2 + static_cast<int>(next() * (NX - 4));
        int qj = 2 + static_cast<int>(next() * (NY - 4));
        if (tl_domain_node_class(dom.d, pi, pj) != 0 || tl_domain_node_class(dom.d, qi, qj) != 0)
            continue;
        double de, dc;
        if (tl_intrinsic_distance(g.g, pi, pj, qi, qj, &de) != TL_OK) continue;
        if (!(de > 0 && de <= 1.0)) continue;
        check(tl_conformal_distance(g.g, pi, pj, qi, qj, &dc), "conformal distance");
        if (!(dc >= std::exp(-0.5) * de * 0.98 && dc <= std::exp(0.5) * de * 1.02)) ++sandwich_fail;
        ++checked;
    }
    ok = ok && sandwich_fail == 0;

    ordered_json rep;
    rep["sectional"] = rows;
    rep["sandwich_pairs"] = checked;
    rep["sandwich_failures"] = sandwich_fail;
    rep["verdict"] = ok;
    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    write_atomic((outdir / "metric_report.json").string(), rep.dump(2) + "\n");
    write_meta(opt, "metric-check", cfg);
    std::printf("metric-check: %d curvature points, %d sandwich pairs, %d failures -> %s\n", npts,
                checked, sandwich_fail, ok ? "ok" : "VERDICT FALSE");
    return ok ? kExitOk : kExitVerdictFalse;
}

int run_curvature_scan(const Options& opt) {
    ordered_json cfg = load_config(opt, {"kind", "C", "b", "nx", "r0", "sigmas", "theta"});
    std::string kind = cfg.value("kind", std::string("grim"));
    double C = opt.c_speed > 0 ? opt.c_speed : cfg.value("C", 1.0);
    int nx = opt.nx > 0 ? opt.nx : cfg.value("nx", 109);
    double r0 = cfg.value("r0", 1.0);
    std::vector<double> sigmas = cfg.value("sigmas", std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0});

    ExactHandle e;
    DomainHandle dom;
    int pi, pj;
    if (kind == "grim") {
        check(tl_exact_grim_reaper(C, &e.e), "exact");
        check(tl_domain_rect(-1.35, 1.35, -1.2, 1.2, nx, ((nx * 8) / 9) | 1, &dom.d), "domain");
        pi = (tl_domain_nx(dom.d) - 1) / 2;
        pj = (tl_domain_ny(dom.d) - 1) / 2;
    } else if (kind == "bowl") {
        check(tl_exact_bowl(C, 8.0, 1e-10, &e.e), "exact");
        check(tl_domain_disk(1.6, nx | 1, &dom.d), "domain");
        pi = pj = (tl_domain_nx(dom.d) - 1) / 2;
    } else {
        fail_usage("curvature-scan: kind must be grim | bowl");
    }
    FieldHandle u;
    check(tl_field_sample(dom.d, e.e, &u.f), "sample");
    GeomHandle g;
    check(tl_geometry_compute(u.f, &g.g), "geometry");
    char* csv = nullptr;
    double C_emp = 0;
    check(tl_curvature_scan_csv(g.g, pi, pj, r0, sigmas.data(), sigmas.size(), &csv, &C_emp),
          "curvature scan");
    std::string csv_body(csv);
    tl_string_free(csv);
    double rho = 0;
    check(tl_graph_radius_bound(g.g, pi, pj, cfg.value("theta", 0.5), &rho), "radius bound");

    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    write_atomic((outdir / "scan.csv").string(), csv_body);
    ordered_json rep;
    rep["kind"] = kind;
    rep["r0"] = r0;
    rep["C_emp"] = C_emp;
    rep["graph_radius_bound"] = rho;
    write_atomic((outdir / "scan_report.json").string(), rep.dump(2) + "\n");
    write_meta(opt, "curvature-scan", cfg);
    std::printf("curvature-scan %s: C_emp=%.6f graph_radius_bound=%.4f -> %s\n", kind.c_str(),
                C_emp, rho, opt.out.c_str());
    return kExitOk;
}

int run_experiment(const Options& opt, const std::string& which) {
    std::vector<std::string> allowed;
    tl_status (*runner)(const char*, tl_experiment_report**) = nullptr;
    if (which == "gallery") {
        allowed = {"nx", "ny", "C", "b", "offsets", "wall_inset"};
        runner = &tl_gallery_run;
    } else if (which == "blowup-scan") {
        allowed = {"domain", "rho", "M_sequence", "nx", "C", "warm_start", "substep"};
        runner = &tl_blowup_run;
    } else {
        allowed = {"kind", "b", "C", "wall", "offsets", "nx"};
        runner = &tl_asymptote_run;
    }
    ordered_json cfg = load_config(opt, allowed);
    tl_experiment_report* rep = nullptr;
    check(runner(cfg.dump().c_str(), &rep), which);
    std::unique_ptr<tl_experiment_report, decltype(&tl_experiment_report_free)> rep_owner(
        rep, &tl_experiment_report_free);
    auto outdir = std::filesystem::path(opt.out);
    std::filesystem::create_directories(outdir);
    write_atomic((outdir / (which + "_report.json")).string(),
                 std::string(tl_experiment_json(rep)) + "\n");
    for (int k = 0; k < tl_experiment_table_count(rep); ++k)
        write_atomic((outdir / (std::string(tl_experiment_table_name(rep, k)) + ".csv")).string(),
                     tl_experiment_table_csv(rep, k));
    write_meta(opt, which, cfg);
    bool verdict = tl_experiment_verdict(rep) != 0;
    std::printf("%s: verdict=%s -> %s\n", which.c_str(), verdict ? "true" : "false",
                opt.out.c_str());
    return verdict ? kExitOk : kExitVerdictFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"translator-lab: numerical laboratory for translating graphs"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Options opt;
    app.add_option("--config", opt.config, "JSON config file");
    app.add_option("--out", opt.out, "output directory");
    app.add_option("--seed", opt.seed, "random seed (default 42)");
    app.add_option("--nx", opt.nx, "grid resolution override (x)");
    app.add_option("--ny", opt.ny, "grid resolution override (y)");
    app.add_option("--c-speed", opt.c_speed, "translation speed override");
    app.add_option("--tol", opt.tol, "tolerance override");

    std::string exact_kind;
    auto* solve = app.add_subcommand("solve", "Newton solve of the translator Dirichlet problem");
    auto* exact = app.add_subcommand("exact", "sample a reference translator");
    exact->add_option("--kind", exact_kind, "grim | tilted | bowl");
    auto* evolve = app.add_subcommand("evolve", "graph mean curvature flow (traveling-wave check)");
    auto* stability = app.add_subcommand("stability", "stability report for a field");
    auto* cscan = app.add_subcommand("curvature-scan", "intrinsic-ball curvature scan");
    auto* mcheck = app.add_subcommand("metric-check", "conformal curvature + distance sandwich");
    auto* gallery = app.add_subcommand("gallery", "classification gallery");
    auto* blowup = app.add_subcommand("blowup-scan", "ramped boundary-data scan");
    auto* asym = app.add_subcommand("asymptote", "wall-tilt asymptote table");
    auto* selftest = app.add_subcommand("selftest", "run built-in quick checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (selftest->parsed()) {
            int failed = tl_selftest(1);
            if (failed < 0) fail_usage(std::string("selftest error: ") + tl_last_error());
            std::printf("selftest: %s\n", failed == 0 ? "all checks passed" : "FAILURES");
            return failed == 0 ? kExitOk : kExitVerdictFalse;
        }
        if (solve->parsed()) return run_solve(opt);
        if (exact->parsed()) return run_exact(opt, exact_kind);
        if (evolve->parsed()) return run_evolve(opt);
        if (stability->parsed()) return run_stability(opt);
        if (cscan->parsed()) return run_curvature_scan(opt);
        if (mcheck->parsed()) return run_metric_check(opt);
        if (gallery->parsed()) return run_experiment(opt, "gallery");
        if (blowup->parsed()) return run_experiment(opt, "blowup-scan");
        if (asym->parsed()) return run_experiment(opt, "asymptote");
    } catch (const std::exception& e) {
        fail_usage(e.what());
    }
    fail_usage("no subcommand given");
}

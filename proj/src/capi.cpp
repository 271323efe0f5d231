#include "translator_lab.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "json.hpp"
#include "translab/exact.hpp"
#include "translab/experiments.hpp"
#include "translab/geometry.hpp"
#include "translab/grid.hpp"
#include "translab/metric.hpp"
#include "translab/selftest.hpp"
#include "translab/solver.hpp"
#include "translab/stability.hpp"

using namespace translab;

namespace {

thread_local std::string g_last_error;

template <typename F>
tl_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return TL_OK;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return TL_ERR_INVALID_ARGUMENT;
    } catch (const std::domain_error& e) {
        g_last_error = e.what();
        return TL_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TL_ERR_RUNTIME;
    }
}

}  // namespace

struct tl_domain {
    DomainPtr d;
};
struct tl_field {
    ScalarField f;
    mutable tl_domain dom_view;
};
struct tl_exact {
    ExactPtr e;
};
struct tl_geometry {
    GraphGeometry g;
};
struct tl_solve_report {
    SolveReport r;
    std::string json;
};
struct tl_stability_report {
    StabilityReport r;
    std::string json;
};
struct tl_experiment_report {
    ExperimentReport r;
    std::string json;
};

extern "C" {

const char* tl_last_error(void) { return g_last_error.c_str(); }

int tl_selftest(int verbose) {
    try {
        SelftestResult r = run_selftest();
        if (verbose)
            for (auto& l : r.lines) std::printf("%s\n", l.c_str());
        return r.failed;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return -1;
    }
}

tl_status tl_domain_rect(double x0, double x1, double y0, double y1, int nx, int ny,
                         tl_domain** out) {
    return guarded([&] { *out = new tl_domain{GridDomain::rect(x0, x1, y0, y1, nx, ny)}; });
}
tl_status tl_domain_slab(double x0, double x1, int nx, double y0, int ny, double hy,
                         tl_domain** out) {
    return guarded([&] { *out = new tl_domain{GridDomain::slab(x0, x1, nx, y0, ny, hy)}; });
}
tl_status tl_domain_disk(double radius, int n, tl_domain** out) {
    return guarded([&] { *out = new tl_domain{GridDomain::disk(radius, n)}; });
}
tl_status tl_domain_annulus(double r_in, double r_out, int n, tl_domain** out) {
    return guarded([&] { *out = new tl_domain{GridDomain::annulus(r_in, r_out, n)}; });
}
tl_status tl_domain_refine(const tl_domain* d, tl_domain** out) {
    return guarded([&] { *out = new tl_domain{d->d->refine()}; });
}
void tl_domain_free(tl_domain* d) { delete d; }
int tl_domain_nx(const tl_domain* d) { return d->d->nx; }
int tl_domain_ny(const tl_domain* d) { return d->d->ny; }
double tl_domain_hx(const tl_domain* d) { return d->d->hx; }
double tl_domain_hy(const tl_domain* d) { return d->d->hy; }
int tl_domain_node_class(const tl_domain* d, int i, int j) {
    return static_cast<int>(d->d->at(i, j));
}

tl_status tl_exact_grim_reaper(double C, tl_exact** out) {
    return guarded([&] { *out = new tl_exact{grim_reaper(C)}; });
}
tl_status tl_exact_tilted_grim_reaper(double b, double C, tl_exact** out) {
    return guarded([&] { *out = new tl_exact{tilted_grim_reaper(b, C)}; });
}
tl_status tl_exact_bowl(double C, double r_max, double tol, tl_exact** out) {
    return guarded([&] { *out = new tl_exact{bowl({C, r_max, tol})}; });
}
tl_status tl_exact_eval(const tl_exact* e, double x, double y, double* u) {
    return guarded([&] { *u = e->e->eval(x, y); });
}
void tl_exact_free(tl_exact* e) { delete e; }

tl_status tl_field_constant(const tl_domain* d, double value, tl_field** out) {
    return guarded([&] { *out = new tl_field{ScalarField(d->d, value), {}}; });
}
tl_status tl_field_sample(const tl_domain* d, const tl_exact* e, tl_field** out) {
    return guarded([&] { *out = new tl_field{sample(*e->e, d->d), {}}; });
}

tl_status tl_field_boundary(const tl_domain* dh, const char* spec_json, tl_field** out) {
    return guarded([&] {
        nlohmann::json spec = nlohmann::json::parse(spec_json ? spec_json : "{}");
        const GridDomain& d = *dh->d;
        ScalarField f(dh->d);
        std::string kind = spec.value("kind", std::string("zero"));
        if (kind == "zero") {
            // already zero
        } else if (kind == "constant") {
            double v = spec.value("value", 0.0);
            for (int n = 0; n < d.size(); ++n)
                if (d.cls[n] == NodeClass::Boundary) f.at_idx(n) = v;
        } else if (kind == "exact") {
            auto ex = spec.value("exact", nlohmann::json::object());
            ExactPtr sol = make_exact(ex.value("kind", std::string("grim")), ex.value("C", 1.0),
                                      ex.value("b", 1.0), ex.value("r_max", 8.0),
                                      ex.value("tol", 1e-10));
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i)
                    if (d.cls[d.idx(i, j)] == NodeClass::Boundary)
                        f(i, j) = sol->eval(d.x(i), d.y(j));
        } else if (kind == "ramp_x") {
            double M = spec.value("M", 1.0);
            double xa = d.x0, xb = d.x0 + (d.nx - 1) * d.hx;
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i)
                    if (d.cls[d.idx(i, j)] == NodeClass::Boundary)
                        f(i, j) = M * (d.x(i) - xa) / (xb - xa);
        } else if (kind == "ramp_radial") {
            double M = spec.value("M", 1.0);
            double mid = d.shape == Shape::Annulus ? (d.param1 + d.param2) / 2 : 0.0;
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i)
                    if (d.cls[d.idx(i, j)] == NodeClass::Boundary)
                        f(i, j) = std::hypot(d.x(i), d.y(j)) > mid ? M : 0.0;
        } else {
            throw std::invalid_argument("unknown boundary kind '" + kind + "'");
        }
        *out = new tl_field{std::move(f), {}};
    });
}

tl_status tl_field_save(const tl_field* f, const char* path) {
    auto st = guarded([&] { save_field(f->f, path); });
    return st == TL_ERR_RUNTIME ? TL_ERR_IO : st;
}
tl_status tl_field_load(const char* path, tl_field** out) {
    auto st = guarded([&] { *out = new tl_field{load_field(path), {}}; });
    return st == TL_ERR_RUNTIME ? TL_ERR_IO : st;
}
const tl_domain* tl_field_domain(const tl_field* f) {
    f->dom_view.d = f->f.domain_ptr();
    return &f->dom_view;
}
size_t tl_field_size(const tl_field* f) { return f->f.values().size(); }
tl_status tl_field_values(const tl_field* f, double* buf, size_t buflen) {
    return guarded([&] {
        if (buflen < f->f.values().size())
            throw std::invalid_argument("tl_field_values: buffer too small");
        std::memcpy(buf, f->f.values().data(), f->f.values().size() * sizeof(double));
    });
}
tl_status tl_field_set(tl_field* f, int i, int j, double value) {
    return guarded([&] {
        const GridDomain& d = f->f.dom();
        if (d.at(i, j) == NodeClass::Exterior)
            throw std::invalid_argument("tl_field_set: EXTERIOR node");
        f->f(i, j) = value;
    });
}
tl_status tl_field_get(const tl_field* f, int i, int j, double* value) {
    return guarded([&] {
        const GridDomain& d = f->f.dom();
        if (d.at(i, j) == NodeClass::Exterior)
            throw std::invalid_argument("tl_field_get: EXTERIOR node");
        *value = f->f(i, j);
    });
}
tl_status tl_field_norms(const tl_field* f, double* sup, double* weighted_l2) {
    return guarded([&] {
        FieldNorms n = norms(f->f);
        if (sup) *sup = n.sup;
        if (weighted_l2) *weighted_l2 = n.weighted_l2;
    });
}
void tl_field_free(tl_field* f) { delete f; }

tl_status tl_residual(const tl_field* u, double C, tl_field** out) {
    return guarded([&] { *out = new tl_field{translator_residual(u->f, C), {}}; });
}

tl_status tl_geometry_compute(const tl_field* u, tl_geometry** out) {
    return guarded([&] { *out = new tl_geometry{compute_geometry(u->f)}; });
}
tl_status tl_geometry_csv(const tl_geometry* g, const char* path) {
    auto st = guarded([&] { geometry_csv(g->g, path); });
    return st == TL_ERR_RUNTIME ? TL_ERR_IO : st;
}
tl_status tl_geometry_value(const tl_geometry* g, int component, int i, int j, double* out) {
    return guarded([&] {
        const GridDomain& d = g->g.domain();
        if (d.at(i, j) == NodeClass::Exterior)
            throw std::invalid_argument("tl_geometry_value: EXTERIOR node");
        int n = d.wrapped_idx(i, j);
        switch (component) {
            case 0: *out = g->g.W[n]; return;
            case 1: *out = g->g.tilt[n]; return;
            case 2: *out = g->g.H_var[n]; return;
            case 3: *out = g->g.normA2[n]; return;
            default: throw std::invalid_argument("tl_geometry_value: component must be 0..3");
        }
    });
}
void tl_geometry_free(tl_geometry* g) { delete g; }

void tl_solver_config_default(tl_solver_config* cfg) {
    cfg->C = 1.0;
    cfg->newton_tol = 1e-10;
    cfg->max_newton = 30;
    cfg->linear_tol = 1e-12;
    cfg->continuation = 1;
    cfg->evolve_dt_safety = 0.2;
}

static std::string solve_report_json(const SolveReport& r) {
    nlohmann::ordered_json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["residual_history"] = r.residual_history;
    j["damping_events"] = r.damping_events;
    j["continuation_used"] = r.continuation_used;
    j["diagnostics"] = r.diagnostics;
    return j.dump(2);
}

tl_status tl_newton_solve(const tl_domain* d, const tl_field* boundary_data,
                          const tl_solver_config* cfg, tl_solve_report** out) {
    tl_status st = guarded([&] {
        SolverConfig sc;
        if (cfg) {
            sc.C = cfg->C;
            sc.newton_tol = cfg->newton_tol;
            sc.max_newton = cfg->max_newton;
            sc.linear_tol = cfg->linear_tol;
            sc.continuation = cfg->continuation != 0;
            sc.evolve_dt_safety = cfg->evolve_dt_safety;
        }
        SolveReport r = newton_solve(d->d, boundary_data->f, sc);
        auto* rep = new tl_solve_report{std::move(r), {}};
        rep->json = solve_report_json(rep->r);
        *out = rep;
    });
    if (st == TL_OK && !(*out)->r.converged) {
        g_last_error = "newton_solve did not converge: " + (*out)->r.diagnostics;
        return TL_ERR_NO_CONVERGENCE;  // report still returned
    }
    return st;
}
int tl_solve_converged(const tl_solve_report* r) { return r->r.converged ? 1 : 0; }
int tl_solve_iterations(const tl_solve_report* r) { return r->r.iterations; }
tl_status tl_solve_field(const tl_solve_report* r, tl_field** out) {
    return guarded([&] { *out = new tl_field{r->r.u, {}}; });
}
const char* tl_solve_json(const tl_solve_report* r) { return r->json.c_str(); }
void tl_solve_report_free(tl_solve_report* r) { delete r; }

tl_status tl_evolve(const tl_field* u0, double C, double T, double dt_safety, int frame,
                    tl_field** out) {
    return guarded([&] {
        EvolveResult r = frame == 0 ? evolve_lab_frame(u0->f, C, T, dt_safety)
                                    : evolve_moving_frame(u0->f, C, T, dt_safety);
        if (r.hit_step_cap) throw std::runtime_error("tl_evolve: step cap exceeded");
        *out = new tl_field{std::move(r.u), {}};
    });
}

tl_status tl_stability_analyze(const tl_field* u, double C, int collar, double eig_tol,
                               uint64_t seed, tl_stability_report** out) {
    return guarded([&] {
        StabilityOptions opt;
        opt.C = C;
        opt.collar = collar > 0 ? collar : 2;
        opt.eig_tol = eig_tol > 0 ? eig_tol : 1e-6;
        opt.seed = seed;
        auto* rep = new tl_stability_report{analyze_stability(u->f, opt), {}};
        rep->json = rep->r.to_json();
        *out = rep;
    });
}
const char* tl_stability_json(const tl_stability_report* r) { return r->json.c_str(); }
double tl_stability_top_eigenvalue(const tl_stability_report* r) { return r->r.top_eigenvalue; }
double tl_stability_identity_gap(const tl_stability_report* r) { return r->r.identity_gap; }
int tl_stability_is_translator(const tl_stability_report* r) { return r->r.translator ? 1 : 0; }
void tl_stability_report_free(tl_stability_report* r) { delete r; }

tl_status tl_sectional_curvature(double p3, double x, double y, double z, int i, int j,
                                 double* out) {
    return guarded([&] { *out = conformal_sectional_curvature(p3, {x, y, z}, i, j); });
}
tl_status tl_intrinsic_distance(const tl_geometry* g, int pi, int pj, int qi, int qj,
                                double* out) {
    return guarded([&] { *out = intrinsic_distance(g->g, pi, pj, qi, qj); });
}
tl_status tl_conformal_distance(const tl_geometry* g, int pi, int pj, int qi, int qj,
                                double* out) {
    return guarded([&] { *out = conformal_distance(g->g, pi, pj, qi, qj); });
}
tl_status tl_curvature_scan_csv(const tl_geometry* g, int pi, int pj, double r0,
                                const double* sigmas, size_t n_sigmas, char** csv_out,
                                double* C_emp) {
    return guarded([&] {
        std::vector<double> sg(sigmas, sigmas + n_sigmas);
        CurvatureScan s = curvature_scan(g->g, pi, pj, r0, sg);
        std::string csv = s.csv();
        char* buf = new char[csv.size() + 1];
        std::memcpy(buf, csv.c_str(), csv.size() + 1);
        *csv_out = buf;
        if (C_emp) *C_emp = s.C_emp;
    });
}
tl_status tl_graph_radius_bound(const tl_geometry* g, int pi, int pj, double theta, double* out) {
    return guarded([&] { *out = graph_radius_bound(g->g, pi, pj, theta); });
}
void tl_string_free(char* s) { delete[] s; }

static tl_status run_experiment(ExperimentReport (*fn)(const std::string&), const char* cfg,
                                tl_experiment_report** out) {
    return guarded([&] {
        auto* rep = new tl_experiment_report{fn(cfg ? cfg : "{}"), {}};
        rep->json = rep->r.to_json();
        *out = rep;
    });
}
tl_status tl_gallery_run(const char* config_json, tl_experiment_report** out) {
    return run_experiment(&classification_gallery, config_json, out);
}
tl_status tl_blowup_run(const char* config_json, tl_experiment_report** out) {
    return run_experiment(&blowup_scan, config_json, out);
}
tl_status tl_asymptote_run(const char* config_json, tl_experiment_report** out) {
    return run_experiment(&asymptote_check, config_json, out);
}
const char* tl_experiment_json(const tl_experiment_report* r) { return r->json.c_str(); }
int tl_experiment_verdict(const tl_experiment_report* r) { return r->r.verdict ? 1 : 0; }
int tl_experiment_applicable(const tl_experiment_report* r) { return r->r.applicable ? 1 : 0; }
int tl_experiment_table_count(const tl_experiment_report* r) {
    return static_cast<int>(r->r.csv_tables.size());
}
const char* tl_experiment_table_name(const tl_experiment_report* r, int k) {
    return r->r.csv_tables[k].first.c_str();
}
const char* tl_experiment_table_csv(const tl_experiment_report* r, int k) {
    return r->r.csv_tables[k].second.c_str();
}
void tl_experiment_report_free(tl_experiment_report* r) { delete r; }

}  // extern "C"

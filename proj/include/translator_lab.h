/* translator_lab.h — C API of the translating-graph laboratory.
 *
 * The core is C++ behind this extern-C surface: opaque handles, integer
 * status codes, and tl_last_error() for the message of the most recent
 * failure on the calling thread. Every object returned through an out
 * parameter is owned by the caller and released with the matching _free.
 */
#ifndef TRANSLATOR_LAB_H
#define TRANSLATOR_LAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
    TL_OK = 0,
    TL_ERR_INVALID_ARGUMENT = 1,
    TL_ERR_RUNTIME = 2,
    TL_ERR_IO = 3,
    TL_ERR_NO_CONVERGENCE = 4
} tl_status;

typedef struct tl_domain tl_domain;
typedef struct tl_field tl_field;
typedef struct tl_exact tl_exact;
typedef struct tl_geometry tl_geometry;
typedef struct tl_solve_report tl_solve_report;
typedef struct tl_stability_report tl_stability_report;
typedef struct tl_experiment_report tl_experiment_report;

/* Message of the last failing call on this thread ("" if none). */
const char* tl_last_error(void);

/* Library self-checks; returns the number of failing checks, prints one
 * line per check to stdout when verbose != 0. */
int tl_selftest(int verbose);

/* ---- domains ---------------------------------------------------------- */
tl_status tl_domain_rect(double x0, double x1, double y0, double y1, int nx, int ny,
                         tl_domain** out);
tl_status tl_domain_slab(double x0, double x1, int nx, double y0, int ny, double hy,
                         tl_domain** out);
tl_status tl_domain_disk(double radius, int n, tl_domain** out);
tl_status tl_domain_annulus(double r_in, double r_out, int n, tl_domain** out);
tl_status tl_domain_refine(const tl_domain* d, tl_domain** out);
void tl_domain_free(tl_domain* d);
int tl_domain_nx(const tl_domain* d);
int tl_domain_ny(const tl_domain* d);
double tl_domain_hx(const tl_domain* d);
double tl_domain_hy(const tl_domain* d);
/* 0 interior, 1 boundary, 2 exterior */
int tl_domain_node_class(const tl_domain* d, int i, int j);

/* ---- exact solutions -------------------------------------------------- */
tl_status tl_exact_grim_reaper(double C, tl_exact** out);
tl_status tl_exact_tilted_grim_reaper(double b, double C, tl_exact** out);
tl_status tl_exact_bowl(double C, double r_max, double tol, tl_exact** out);
tl_status tl_exact_eval(const tl_exact* e, double x, double y, double* u);
void tl_exact_free(tl_exact* e);

/* ---- fields ------------------------------------------------------------ */
tl_status tl_field_constant(const tl_domain* d, double value, tl_field** out);
tl_status tl_field_sample(const tl_domain* d, const tl_exact* e, tl_field** out);
/* Dirichlet data builders (values at BOUNDARY nodes):
 *   spec_json: {"kind":"zero"|"constant"|"exact"|"ramp_x"|"ramp_radial",
 *               "value":..,"M":..,"exact":{"kind":..,"C":..,"b":..}} */
tl_status tl_field_boundary(const tl_domain* d, const char* spec_json, tl_field** out);
tl_status tl_field_save(const tl_field* f, const char* path);
tl_status tl_field_load(const char* path, tl_field** out);
const tl_domain* tl_field_domain(const tl_field* f);
size_t tl_field_size(const tl_field* f);
tl_status tl_field_values(const tl_field* f, double* buf, size_t buflen);
tl_status tl_field_set(tl_field* f, int i, int j, double value);
tl_status tl_field_get(const tl_field* f, int i, int j, double* value);
tl_status tl_field_norms(const tl_field* f, double* sup, double* weighted_l2);
void tl_field_free(tl_field* f);

/* Residual of the translator equation div(grad u/W) - C/W. */
tl_status tl_residual(const tl_field* u, double C, tl_field** out);

/* ---- geometry ----------------------------------------------------------- */
tl_status tl_geometry_compute(const tl_field* u, tl_geometry** out);
tl_status tl_geometry_csv(const tl_geometry* g, const char* path);
/* component: 0 W, 1 tilt, 2 H_var, 3 normA2 */
tl_status tl_geometry_value(const tl_geometry* g, int component, int i, int j, double* out);
void tl_geometry_free(tl_geometry* g);

/* ---- solver -------------------------------------------------------------- */
typedef struct tl_solver_config {
    double C;
    double newton_tol;
    int max_newton;
    double linear_tol;
    int continuation; /* 0/1 */
    double evolve_dt_safety;
} tl_solver_config;
void tl_solver_config_default(tl_solver_config* cfg);

tl_status tl_newton_solve(const tl_domain* d, const tl_field* boundary_data,
                          const tl_solver_config* cfg, tl_solve_report** out);
int tl_solve_converged(const tl_solve_report* r);
int tl_solve_iterations(const tl_solve_report* r);
tl_status tl_solve_field(const tl_solve_report* r, tl_field** out);
const char* tl_solve_json(const tl_solve_report* r);
void tl_solve_report_free(tl_solve_report* r);

/* Explicit graph mean curvature flow for time T; frame: 0 lab (boundary data
 * rises with speed C), 1 moving (translators are fixed points). */
tl_status tl_evolve(const tl_field* u0, double C, double T, double dt_safety, int frame,
                    tl_field** out);

/* ---- stability ------------------------------------------------------------ */
tl_status tl_stability_analyze(const tl_field* u, double C, int collar, double eig_tol,
                               uint64_t seed, tl_stability_report** out);
const char* tl_stability_json(const tl_stability_report* r);
double tl_stability_top_eigenvalue(const tl_stability_report* r);
double tl_stability_identity_gap(const tl_stability_report* r);
int tl_stability_is_translator(const tl_stability_report* r);
void tl_stability_report_free(tl_stability_report* r);

/* ---- conformal metric ------------------------------------------------------ */
/* Sectional curvature of the coordinate plane (i,j) of e^{x3-p3} * delta. */
tl_status tl_sectional_curvature(double p3, double x, double y, double z, int i, int j,
                                 double* out);
tl_status tl_intrinsic_distance(const tl_geometry* g, int pi, int pj, int qi, int qj, double* out);
tl_status tl_conformal_distance(const tl_geometry* g, int pi, int pj, int qi, int qj, double* out);
/* CSV table "sigma,sup_A2,product"; caller frees with tl_string_free. */
tl_status tl_curvature_scan_csv(const tl_geometry* g, int pi, int pj, double r0,
                                const double* sigmas, size_t n_sigmas, char** csv_out,
                                double* C_emp);
tl_status tl_graph_radius_bound(const tl_geometry* g, int pi, int pj, double theta, double* out);
void tl_string_free(char* s);

/* ---- experiments ------------------------------------------------------------ */
tl_status tl_gallery_run(const char* config_json, tl_experiment_report** out);
tl_status tl_blowup_run(const char* config_json, tl_experiment_report** out);
tl_status tl_asymptote_run(const char* config_json, tl_experiment_report** out);
const char* tl_experiment_json(const tl_experiment_report* r);
int tl_experiment_verdict(const tl_experiment_report* r);
int tl_experiment_applicable(const tl_experiment_report* r);
int tl_experiment_table_count(const tl_experiment_report* r);
const char* tl_experiment_table_name(const tl_experiment_report* r, int k);
const char* tl_experiment_table_csv(const tl_experiment_report* r, int k);
void tl_experiment_report_free(tl_experiment_report* r);

#ifdef __cplusplus
}
#endif

#endif /* TRANSLATOR_LAB_H */

#include "translab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "translab/exact.hpp"
#include "translab/geometry.hpp"
#include "translab/solver.hpp"
#include "translab/variational.hpp"

namespace translab {

using nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

ordered_json parse_config(const std::string& text, const std::vector<std::string>& allowed,
                          const std::string& context) {
    ordered_json j = text.empty() ? ordered_json::object() : ordered_json::parse(text);
    if (!j.is_object()) throw std::invalid_argument(context + ": config must be a JSON object");
    for (auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto& a : allowed) ok = ok || key == a;
        if (!ok) throw std::invalid_argument(context + ": unknown config key '" + key + "'");
    }
    return j;
}

double residual_sup_interior(const ScalarField& u, double C, int collar) {
    ScalarField R = translator_residual(u, C);
    return collar > 0 ? sup_interior(R, collar) : norms(R).sup;
}

struct CaseOrder {
    double res_coarse, res_fine, ratio, order;
};

CaseOrder residual_order(const ExactSolution& sol, DomainPtr coarse, int collar) {
    CaseOrder o{};
    ScalarField uc = sample(sol, coarse);
    o.res_coarse = residual_sup_interior(uc, sol.speed(), collar);
    DomainPtr fine = coarse->refine();
    ScalarField uf = sample(sol, fine);
    o.res_fine = residual_sup_interior(uf, sol.speed(), collar);
    o.ratio = o.res_coarse / o.res_fine;
    o.order = std::log2(o.ratio);
    return o;
}

}  // namespace

std::string ExperimentReport::to_json() const {
    ordered_json j;
    j["id"] = id;
    j["inputs"] = inputs_json.empty() ? ordered_json::object() : ordered_json::parse(inputs_json);
    j["metrics"] = metrics_json.empty() ? ordered_json::object() : ordered_json::parse(metrics_json);
    j["verdict"] = verdict;
    j["applicable"] = applicable;
    j["verdict_detail"] = verdict_detail;
    return j.dump(2);
}

void reject_unknown_keys(const std::string& config_json, const std::vector<std::string>& allowed,
                         const std::string& context) {
    parse_config(config_json, allowed, context);
}

ExperimentReport classification_gallery(const std::string& config_json) {
    ordered_json cfg = parse_config(config_json, {"nx", "ny", "C", "b", "offsets", "wall_inset"},
                                    "gallery");
    const int nx = cfg.value("nx", 129);
    const int ny = cfg.value("ny", 17);
    const double C = cfg.value("C", 1.0);
    const double b = cfg.value("b", 1.0);
    const double inset = cfg.value("wall_inset", 0.2);
    std::vector<double> offsets = cfg.value("offsets", std::vector<double>{0.05, 0.1, 0.2});

    ExperimentReport rep;
    rep.id = "classification_gallery";
    rep.inputs_json = cfg.dump();

    ordered_json metrics;
    bool ok = true;
    std::ostringstream detail;
    std::ostringstream csv;
    csv << "case,res_coarse,res_fine,ratio,order\n";

    struct Case {
        std::string name;
        ExactPtr sol;
        DomainPtr dom;
    };
    std::vector<Case> cases;
    {
        ExactPtr g = grim_reaper(C);
        double hw = *g->slab_half_width();
        cases.push_back({"grim_reaper", g,
                         GridDomain::rect(-hw + inset, hw - inset, 0, 0.5, nx, ny)});
        ExactPtr t = tilted_grim_reaper(b, C);
        double hwt = *t->slab_half_width();
        cases.push_back({"tilted_grim_reaper", t,
                         GridDomain::rect(-hwt + inset, hwt - inset, 0, 0.5, nx, ny)});
        ExactPtr bw = bowl({C, 8.0, 1e-10});
        cases.push_back({"bowl", bw, GridDomain::disk(2.0, nx | 1)});
    }

    metrics["cases"] = ordered_json::array();
    for (auto& c : cases) {
        CaseOrder o;
        try {
            o = residual_order(*c.sol, c.dom, 1);
        } catch (const std::exception& e) {
            rep.verdict = false;
            rep.verdict_detail = std::string("case '") + c.name + "' failed: " + e.what();
            rep.metrics_json = metrics.dump();
            return rep;
        }
        bool in_window = o.order >= 1.7 && o.order <= 2.5;
        ok = ok && in_window;
        if (!in_window) detail << c.name << " residual order " << o.order << " outside [1.7,2.5]; ";
        ordered_json jc;
        jc["name"] = c.name;
        jc["kind"] = c.sol->kind();
        jc["res_coarse"] = o.res_coarse;
        jc["res_fine"] = o.res_fine;
        jc["ratio"] = o.ratio;
        jc["order"] = o.order;
        char line[256];
        std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g\n", c.name.c_str(),
                      o.res_coarse, o.res_fine, o.ratio, o.order);
        csv << line;

        if (auto hw = c.sol->slab_half_width()) {
            ordered_json tilts = ordered_json::array();
            double scale = kPi / (2 * *hw);  // width-scaled constant
            for (double eps : offsets) {
                double t = *c.sol->tilt(*hw - eps, 0.0);
                bool pass = t <= 1.5 * eps * scale;
                ok = ok && pass;
                if (!pass)
                    detail << c.name << " wall tilt " << t << " above 1.5*eps at eps=" << eps
                           << "; ";
                tilts.push_back({{"offset", eps}, {"tilt", t}, {"bound", 1.5 * eps * scale}});
            }
            jc["wall_tilt"] = tilts;
        } else {
            // entire type: probe a few radii to confirm the solution covers them
            ordered_json radii = ordered_json::array();
            for (double r : {0.5, 1.0, 2.0, 4.0}) {
                double v = c.sol->eval(r, 0.0);
                radii.push_back({{"r", r}, {"u", v}});
            }
            jc["entire_samples"] = radii;
        }
        metrics["cases"].push_back(jc);
    }
    metrics["types"] = {"GRIM_REAPER", "TILTED_GRIM_REAPER", "BOWL"};

    rep.metrics_json = metrics.dump();
    rep.verdict = ok;
    rep.verdict_detail = ok ? "all residual orders in [1.7,2.5]; wall tilt below 1.5*offset"
                            : detail.str();
    rep.csv_tables.emplace_back("gallery", csv.str());
    return rep;
}

ExperimentReport blowup_scan(const std::string& config_json) {
    ordered_json cfg = parse_config(
        config_json, {"domain", "rho", "M_sequence", "nx", "C", "warm_start", "substep"},
        "blowup-scan");
    const std::string domain = cfg.value("domain", std::string("SLAB"));
    const double rho = cfg.value("rho", 1.0);
    std::vector<double> Ms = cfg.value("M_sequence", std::vector<double>{1, 2, 4, 8});
    const int nx = cfg.value("nx", 65);
    const bool disk_mode = domain == "DISK";
    if (!disk_mode && domain != "SLAB")
        throw std::invalid_argument("blowup-scan: domain must be SLAB or DISK");
    // Wall tilt scales like e^{-C M} (the Harnack decay), so the slab scan
    // runs at a slower speed to keep the M=8 boundary layer resolvable at
    // desk resolutions; the disk comparison against 1/rho uses C = 1.
    const double C = cfg.value("C", disk_mode ? 1.0 : 0.25);
    const double substep = cfg.value("substep", 0.5);
    const bool warm = cfg.value("warm_start", true);
    for (size_t k = 1; k < Ms.size(); ++k)
        if (!(Ms[k] > Ms[k - 1]))
            throw std::invalid_argument("blowup-scan: M_sequence must be increasing");

    ExperimentReport rep;
    rep.id = "blowup_scan";
    rep.inputs_json = cfg.dump();

    DomainPtr dom;
    if (disk_mode) {
        // realized as an annulus: the inner reference ring pins the vertical
        // shift so the ramp cannot be absorbed by shift invariance
        dom = GridDomain::annulus(0.2 * rho, rho, nx | 1);
    } else {
        double a = (kPi - 0.4) / 2;
        dom = GridDomain::slab(-a, a, nx, 0.0, 8, 2 * a / (nx - 1));
    }
    const GridDomain& d = *dom;
    const double mid_r = disk_mode ? (0.2 * rho + rho) / 2 : 0.0;

    // Measurement collar: for exact slab walls the first two interior rings;
    // for the masked annulus a band three to six cells in, clear of the
    // staircase ring, restricted to the outer side.
    const int band_lo = disk_mode ? 3 : 1, band_hi = disk_mode ? 6 : 2;
    auto inner_mask = interior_core_mask(d, band_lo);
    auto outer_mask = interior_core_mask(d, band_hi + 1);
    std::vector<std::uint8_t> collar(d.size(), 0);
    for (int n = 0; n < d.size(); ++n) {
        if (d.cls[n] != NodeClass::Interior || !inner_mask[n] || outer_mask[n]) continue;
        if (disk_mode) {
            int i = n % d.nx, j = n / d.nx;
            if (std::hypot(d.x(i), d.y(j)) <= mid_r) continue;
        }
        collar[n] = 1;
    }

    auto boundary_data = [&](double M) {
        ScalarField bc(dom);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                int n = d.idx(i, j);
                if (d.cls[n] != NodeClass::Boundary) continue;
                if (disk_mode)
                    bc.at_idx(n) = std::hypot(d.x(i), d.y(j)) > mid_r ? M : 0.0;
                else
                    bc.at_idx(n) = (i == d.nx - 1) ? M : 0.0;  // 0 left wall, M right wall
            }
        return bc;
    };

    ordered_json steps = ordered_json::array();
    std::ostringstream csv;
    csv << "M,converged,min_collar_tilt,sup_grad,mean_collar_absH\n";
    std::vector<double> tilts, meanH;
    std::vector<bool> conv;
    ScalarField prev;
    bool have_prev = false;
    double M_done = 0;

    for (double M : Ms) {
        SolverConfig scfg;
        scfg.C = C;
        scfg.continuation = false;
        SolveReport sr;
        if (warm) {
            // march the ramp amplitude in bounded increments, warm-starting
            // each solve from the last converged state
            double Mcur = M_done;
            while (true) {
                double Mnext = std::min(M, Mcur + substep);
                sr = newton_solve(dom, boundary_data(Mnext), scfg, have_prev ? &prev : nullptr);
                if (sr.converged) {
                    prev = sr.u;
                    have_prev = true;
                    Mcur = Mnext;
                    M_done = Mnext;
                    if (Mcur >= M) break;
                } else {
                    break;  // recorded as non-converged at this M
                }
            }
        } else {
            sr = newton_solve(dom, boundary_data(M), scfg);
        }

        // metrics come from the report's (best) iterate, converged or not
        GraphGeometry g = compute_geometry(sr.u);
        double min_tilt = 1e300, sup_grad = 0, sumH = 0;
        long cnt = 0;
        for (int n = 0; n < d.size(); ++n) {
            if (d.cls[n] != NodeClass::Interior) continue;
            sup_grad = std::max(sup_grad, std::hypot(g.ux[n], g.uy[n]));
            if (collar[n]) {
                min_tilt = std::min(min_tilt, g.tilt[n]);
                sumH += std::abs(g.H_var[n]);
                ++cnt;
            }
        }
        double mH = cnt ? sumH / cnt : 0.0;
        conv.push_back(sr.converged);
        tilts.push_back(min_tilt);
        meanH.push_back(mH);
        steps.push_back({{"M", M},
                         {"converged", sr.converged},
                         {"iterations", sr.iterations},
                         {"warm_start", warm},
                         {"min_collar_tilt", min_tilt},
                         {"sup_grad", sup_grad},
                         {"mean_collar_absH", mH}});
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%d,%.17g,%.17g,%.17g\n", M, sr.converged ? 1 : 0,
                      min_tilt, sup_grad, mH);
        csv << line;
    }

    ordered_json metrics;
    metrics["steps"] = steps;
    bool any = false;
    for (bool c : conv) any = any || c;
    std::ostringstream detail;
    bool ok = true;
    if (!any) {
        rep.applicable = false;
        detail << "inconclusive: no solve converged";
        ok = false;
    } else if (!disk_mode) {
        double last = 1e300;
        for (size_t k = 0; k < Ms.size(); ++k) {
            if (!conv[k]) {
                ok = false;
                detail << "M=" << Ms[k] << " did not converge; ";
                continue;
            }
            if (!(tilts[k] < last)) {
                ok = false;
                detail << "collar tilt not strictly decreasing at M=" << Ms[k] << "; ";
            }
            last = tilts[k];
        }
        if (ok) detail << "collar tilt strictly decreasing toward 0 across the scan";
    } else {
        for (size_t k = 0; k < Ms.size(); ++k) {
            if (!conv[k]) {
                detail << "M=" << Ms[k] << " did not converge (onset of non-existence); ";
                continue;
            }
            double lo = 0.5 / rho, hi = 1.5 / rho;
            if (!(meanH[k] >= lo && meanH[k] <= hi)) {
                ok = false;
                detail << "collar |H| " << meanH[k] << " outside [0.5,1.5]/rho at M=" << Ms[k]
                       << "; ";
            }
        }
        if (ok)
            detail << "collar |H| stays within 50% of the boundary-circle curvature 1/rho while "
                      "the collar tilt saturates near the cylinder bound";
    }
    rep.metrics_json = metrics.dump();
    rep.verdict = ok;
    rep.verdict_detail = detail.str();
    rep.csv_tables.emplace_back("blowup", csv.str());
    return rep;
}

ExperimentReport asymptote_check(const std::string& config_json) {
    ordered_json cfg =
        parse_config(config_json, {"kind", "b", "C", "wall", "offsets", "nx"}, "asymptote");
    const std::string kind = cfg.value("kind", std::string("grim"));
    const double b = cfg.value("b", 1.0);
    const double C = cfg.value("C", 1.0);
    const std::string wall = cfg.value("wall", std::string("right"));
    std::vector<double> offsets = cfg.value("offsets", std::vector<double>{0.05, 0.1, 0.2, 0.4});
    const int nx = cfg.value("nx", 257);

    ExperimentReport rep;
    rep.id = "asymptote_check";
    rep.inputs_json = cfg.dump();

    if (kind == "flat") {
        rep.applicable = false;
        rep.verdict = true;
        rep.verdict_detail = "not applicable: flat plane has no wall";
        rep.metrics_json = "{}";
        return rep;
    }
    if (wall != "left" && wall != "right")
        throw std::invalid_argument("asymptote: wall must be 'left' or 'right'");

    ExactPtr sol = kind == "tilted" ? tilted_grim_reaper(b, C) : grim_reaper(C);
    double hw = *sol->slab_half_width();
    for (double e : offsets)
        if (!(e > 0 && e < 2 * hw))
            throw std::invalid_argument("asymptote: offset outside the slab");

    double inset = 0.02;
    DomainPtr dom = GridDomain::rect(-hw + inset, hw - inset, 0, 0.25, nx, 9);
    ScalarField u = sample(*sol, dom);
    GraphGeometry g = compute_geometry(u);
    const GridDomain& d = *dom;

    std::ostringstream csv;
    csv << "offset,max_tilt,bound\n";
    ordered_json rows = ordered_json::array();
    bool ok = true;
    std::ostringstream detail;
    double scale = kPi / (2 * hw);
    double prev_tilt = -1;
    std::vector<double> sorted = offsets;
    std::sort(sorted.begin(), sorted.end());
    for (double eps : sorted) {
        double xw = wall == "right" ? hw - eps : -hw + eps;
        int i = static_cast<int>(std::lround((xw - d.x0) / d.hx));
        i = std::max(0, std::min(d.nx - 1, i));
        double mt = 0;
        for (int j = 0; j < d.ny; ++j)
            if (d.at(i, j) != NodeClass::Exterior) mt = std::max(mt, g.tilt[d.idx(i, j)]);
        double bound = 1.5 * eps * scale;
        if (mt > bound) {
            ok = false;
            detail << "tilt " << mt << " above bound " << bound << " at offset " << eps << "; ";
        }
        if (mt < prev_tilt) {
            ok = false;
            detail << "tilt not monotone toward the wall at offset " << eps << "; ";
        }
        prev_tilt = mt;
        rows.push_back({{"offset", eps}, {"max_tilt", mt}, {"bound", bound}});
        char line[128];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", eps, mt, bound);
        csv << line;
    }
    ordered_json metrics;
    metrics["rows"] = rows;
    rep.metrics_json = metrics.dump();
    rep.verdict = ok;
    rep.verdict_detail = ok ? "tilt decays toward the wall below 1.5*offset" : detail.str();
    rep.csv_tables.emplace_back("asymptote", csv.str());
    return rep;
}

}  // namespace translab

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "translab/grid.hpp"

namespace translab {

/// Reference translators: closed-form slab solutions and the ODE-integrated
/// bowl. Evaluators reject points outside the natural domain.
class ExactSolution {
public:
    virtual ~ExactSolution() = default;
    virtual std::string kind() const = 0;
    virtual double speed() const = 0;
    virtual double eval(double x, double y) const = 0;
    virtual bool contains(double x, double y) const = 0;
    // Analytic tilt <e3,nu> = 1/W where available.
    virtual std::optional<double> tilt(double, double) const { return std::nullopt; }
    // Half-width of the natural slab, if the solution lives on one.
    virtual std::optional<double> slab_half_width() const { return std::nullopt; }
};

using ExactPtr = std::shared_ptr<const ExactSolution>;

// u = -log(cos(Cx))/C on |x| < pi/(2C); the default C=1 gives u = -log cos x.
ExactPtr grim_reaper(double C = 1.0);

// u = -(mu^2/C) log cos(Cx/mu) + b y, mu = sqrt(1+b^2), on |x| < mu pi/(2C).
ExactPtr tilted_grim_reaper(double b, double C = 1.0);

struct BowlOptions {
    double C = 1.0;
    double r_max = 8.0;
    double tol = 1e-10;
};

// Rotationally symmetric entire translator: radial profile v(r) solving
// (1/r)(r v'/W)' = C/W, v(0)=v'(0)=0, integrated adaptively with monotone
// cubic dense output.
ExactPtr bowl(const BowlOptions& opt = {});

ExactPtr make_exact(const std::string& kind, double C, double b, double r_max, double tol);

// Samples u over every non-EXTERIOR node; rejects domains leaving the
// solution's natural domain.
ScalarField sample(const ExactSolution& sol, DomainPtr dom);

}  // namespace translab

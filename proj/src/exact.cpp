#include "translab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace translab {

namespace {

constexpr double kPi = 3.14159265358979323846;

class GrimReaper final : public ExactSolution {
public:
    explicit GrimReaper(double C) : C_(C) {
        if (!(C > 0)) throw std::invalid_argument("grim_reaper: speed C must be positive");
    }
    std::string kind() const override { return "GRIM_REAPER"; }
    double speed() const override { return C_; }
    bool contains(double x, double) const override { return std::abs(x) < kPi / (2 * C_); }
    double eval(double x, double y) const override {
        if (!contains(x, y))
            throw std::domain_error("grim_reaper: evaluation outside slab |x| < pi/2C");
        return -std::log(std::cos(C_ * x)) / C_;
    }
    std::optional<double> tilt(double x, double y) const override {
        if (!contains(x, y)) return std::nullopt;
        return std::cos(C_ * x);
    }
    std::optional<double> slab_half_width() const override { return kPi / (2 * C_); }

private:
    double C_;
};

class TiltedGrimReaper final : public ExactSolution {
public:
    TiltedGrimReaper(double b, double C) : b_(b), C_(C), mu_(std::sqrt(1 + b * b)) {
        if (!(C > 0)) throw std::invalid_argument("tilted_grim_reaper: speed C must be positive");
    }
    std::string kind() const override { return "TILTED_GRIM_REAPER"; }
    double speed() const override { return C_; }
    bool contains(double x, double) const override { return std::abs(x) < mu_ * kPi / (2 * C_); }
    double eval(double x, double y) const override {
        if (!contains(x, y))
            throw std::domain_error("tilted_grim_reaper: evaluation outside slab |x| < mu*pi/2C");
        return -(mu_ * mu_ / C_) * std::log(std::cos(C_ * x / mu_)) + b_ * y;
    }
    std::optional<double> tilt(double x, double y) const override {
        if (!contains(x, y)) return std::nullopt;
        double t = C_ * x / mu_;
        double ux = mu_ * std::tan(t);
        double w = std::sqrt(1 + ux * ux + b_ * b_);
        return 1.0 / w;
    }
    std::optional<double> slab_half_width() const override { return mu_ * kPi / (2 * C_); }

private:
    double b_, C_, mu_;
};

// v'' = (1+v'^2) (C - v'/r); series v = C r^2/4 + C^3 r^4/128 near the axis.
class Bowl final : public ExactSolution {
public:
    explicit Bowl(const BowlOptions& opt) : C_(opt.C), r_max_(opt.r_max), tol_(opt.tol) {
        if (!(C_ > 0)) throw std::invalid_argument("bowl: speed C must be positive");
        if (!(r_max_ > 0)) throw std::invalid_argument("bowl: r_max must be positive");
        if (!(tol_ > 0)) throw std::invalid_argument("bowl: tol must be positive");
        integrate();
    }
    std::string kind() const override { return "BOWL"; }
    double speed() const override { return C_; }
    bool contains(double x, double y) const override { return std::hypot(x, y) <= r_max_; }
    double eval(double x, double y) const override {
        double r = std::hypot(x, y);
        if (r > r_max_) throw std::domain_error("bowl: evaluation beyond r_max");
        return profile(r);
    }
    std::optional<double> tilt(double x, double y) const override {
        double r = std::hypot(x, y);
        if (r > r_max_) return std::nullopt;
        double s = slope(r);
        return 1.0 / std::sqrt(1 + s * s);
    }

    double profile(double r) const {
        if (r <= r0_) return C_ * r * r / 4 + C_ * C_ * C_ * r * r * r * r / 128;
        size_t k = locate(r);
        return hermite(r, rs_[k], rs_[k + 1], vs_[k], vs_[k + 1], ss_[k], ss_[k + 1]);
    }
    double slope(double r) const {
        if (r <= r0_) return C_ * r / 2 + C_ * C_ * C_ * r * r * r / 32;
        size_t k = locate(r);
        return hermite_deriv(r, rs_[k], rs_[k + 1], vs_[k], vs_[k + 1], ss_[k], ss_[k + 1]);
    }
    const std::vector<double>& table_r() const { return rs_; }
    const std::vector<double>& table_v() const { return vs_; }
    const std::vector<double>& table_s() const { return ss_; }

private:
    double C_, r_max_, tol_;
    double r0_ = 1e-3;
    std::vector<double> rs_, vs_, ss_;

    double rhs(double r, double s) const { return (1 + s * s) * (C_ - s / r); }

    void integrate() {
        double r = r0_;
        double v = C_ * r * r / 4 + std::pow(C_, 3) * std::pow(r, 4) / 128;
        double s = C_ * r / 2 + std::pow(C_, 3) * std::pow(r, 3) / 32;
        rs_ = {r};
        vs_ = {v};
        ss_ = {s};
        double h = 1e-3;
        const double hmax = 0.01 * std::max(1.0, r_max_ / 8);
        while (r < r_max_) {
            h = std::min(h, r_max_ - r);
            if (h < 1e-14)
                throw std::runtime_error("bowl: integrator step underflow at r=" + std::to_string(r));
            // embedded RK: one full RK4 step vs two half steps (order-4 pair)
            auto rk4 = [&](double rr, double vv, double sv, double hh, double& vo, double& so) {
                double k1v = sv, k1s = rhs(rr, sv);
                double k2v = sv + hh / 2 * k1s, k2s = rhs(rr + hh / 2, sv + hh / 2 * k1s);
                double k3v = sv + hh / 2 * k2s, k3s = rhs(rr + hh / 2, sv + hh / 2 * k2s);
                double k4v = sv + hh * k3s, k4s = rhs(rr + hh, sv + hh * k3s);
                vo = vv + hh / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
                so = sv + hh / 6 * (k1s + 2 * k2s + 2 * k3s + k4s);
            };
            double v1, s1, v2a, s2a, v2, s2;
            rk4(r, v, s, h, v1, s1);
            rk4(r, v, s, h / 2, v2a, s2a);
            rk4(r + h / 2, v2a, s2a, h / 2, v2, s2);
            double err = std::max(std::abs(v1 - v2), std::abs(s1 - s2)) / 15.0;
            double scale = tol_ * (1 + std::max(std::abs(v2), std::abs(s2)));
            if (err <= scale) {
                r += h;
                v = v2 + (v2 - v1) / 15;  // local extrapolation
                s = s2 + (s2 - s1) / 15;
                rs_.push_back(r);
                vs_.push_back(v);
                ss_.push_back(s);
                if (err < scale / 32) h *= 2;
                h = std::min(h, hmax);
            } else {
                h /= 2;
            }
        }
    }

    size_t locate(double r) const {
        auto it = std::upper_bound(rs_.begin(), rs_.end(), r);
        size_t k = static_cast<size_t>(std::max<long>(0, (it - rs_.begin()) - 1));
        return std::min(k, rs_.size() - 2);
    }

    // Cubic Hermite with Fritsch-Carlson monotonicity safeguard.
    static void limited_slopes(double d, double m0, double m1, double& l0, double& l1) {
        if (d == 0) {
            l0 = l1 = 0;
            return;
        }
        double a = m0 / d, b = m1 / d;
        double s = a * a + b * b;
        if (s > 9) {
            double t = 3 / std::sqrt(s);
            a *= t;
            b *= t;
        }
        l0 = a * d;
        l1 = b * d;
    }
    static double hermite(double r, double ra, double rb, double va, double vb, double sa,
                          double sb) {
        double h = rb - ra, t = (r - ra) / h;
        double d = (vb - va) / h, m0, m1;
        limited_slopes(d, sa, sb, m0, m1);
        double t2 = t * t, t3 = t2 * t;
        return va * (2 * t3 - 3 * t2 + 1) + h * m0 * (t3 - 2 * t2 + t) + vb * (-2 * t3 + 3 * t2) +
               h * m1 * (t3 - t2);
    }
    static double hermite_deriv(double r, double ra, double rb, double va, double vb, double sa,
                                double sb) {
        double h = rb - ra, t = (r - ra) / h;
        double d = (vb - va) / h, m0, m1;
        limited_slopes(d, sa, sb, m0, m1);
        double t2 = t * t;
        return (va * (6 * t2 - 6 * t) + h * m0 * (3 * t2 - 4 * t + 1) + vb * (-6 * t2 + 6 * t) +
                h * m1 * (3 * t2 - 2 * t)) /
               h;
    }
};

}  // namespace

ExactPtr grim_reaper(double C) { return std::make_shared<GrimReaper>(C); }

ExactPtr tilted_grim_reaper(double b, double C) {
    return std::make_shared<TiltedGrimReaper>(b, C);
}

ExactPtr bowl(const BowlOptions& opt) { return std::make_shared<Bowl>(opt); }

ExactPtr make_exact(const std::string& kind, double C, double b, double r_max, double tol) {
    if (kind == "grim" || kind == "grim_reaper" || kind == "GRIM_REAPER") return grim_reaper(C);
    if (kind == "tilted" || kind == "tilted_grim_reaper" || kind == "TILTED_GRIM_REAPER")
        return tilted_grim_reaper(b, C);
    if (kind == "bowl" || kind == "BOWL") return bowl({C, r_max, tol});
    throw std::invalid_argument("unknown exact solution kind '" + kind + "'");
}

ScalarField sample(const ExactSolution& sol, DomainPtr dom) {
    ScalarField f(dom);
    for (int j = 0; j < dom->ny; ++j)
        for (int i = 0; i < dom->nx; ++i) {
            if (dom->cls[dom->idx(i, j)] == NodeClass::Exterior) continue;
            f(i, j) = sol.eval(dom->x(i), dom->y(j));
        }
    return f;
}

}  // namespace translab

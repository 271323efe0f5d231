#include "translab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace translab {

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::Rect: return "RECT";
        case Shape::Slab: return "SLAB";
        case Shape::Disk: return "DISK";
        case Shape::Annulus: return "ANNULUS";
    }
    return "RECT";
}

Shape shape_from_name(const std::string& name) {
    if (name == "RECT") return Shape::Rect;
    if (name == "SLAB") return Shape::Slab;
    if (name == "DISK") return Shape::Disk;
    if (name == "ANNULUS") return Shape::Annulus;
    throw std::runtime_error("unknown shape tag '" + name + "'");
}

static void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::shared_ptr<const GridDomain> GridDomain::rect(double x0, double x1, double y0, double y1,
                                                   int nx, int ny) {
    require(x1 > x0 && y1 > y0, "rect domain: degenerate extents (need x1>x0, y1>y0)");
    require(nx >= 3 && ny >= 3, "rect domain: resolution must be >= 3 per axis");
    auto d = std::make_shared<GridDomain>();
    d->shape = Shape::Rect;
    d->nx = nx;
    d->ny = ny;
    d->hx = (x1 - x0) / (nx - 1);
    d->hy = (y1 - y0) / (ny - 1);
    d->x0 = x0;
    d->y0 = y0;
    d->cls.assign(static_cast<size_t>(nx) * ny, NodeClass::Boundary);
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) d->cls[d->idx(i, j)] = NodeClass::Interior;
    d->validate();
    return d;
}

std::shared_ptr<const GridDomain> GridDomain::slab(double x0, double x1, int nx, double y0,
                                                   int ny, double hy) {
    require(x1 > x0, "slab domain: degenerate extents (need x1>x0)");
    require(nx >= 3 && ny >= 3, "slab domain: resolution must be >= 3 per axis");
    require(hy > 0, "slab domain: hy must be positive");
    auto d = std::make_shared<GridDomain>();
    d->shape = Shape::Slab;
    d->nx = nx;
    d->ny = ny;
    d->hx = (x1 - x0) / (nx - 1);
    d->hy = hy;
    d->x0 = x0;
    d->y0 = y0;
    d->periodic_y = true;
    d->cls.assign(static_cast<size_t>(nx) * ny, NodeClass::Interior);
    for (int j = 0; j < ny; ++j) {
        d->cls[d->idx(0, j)] = NodeClass::Boundary;
        d->cls[d->idx(nx - 1, j)] = NodeClass::Boundary;
    }
    d->validate();
    return d;
}

std::shared_ptr<const GridDomain> GridDomain::disk(double radius, int n) {
    require(radius > 0, "disk domain: radius must be positive");
    require(n >= 3, "disk domain: resolution must be >= 3");
    auto d = std::make_shared<GridDomain>();
    d->shape = Shape::Disk;
    d->nx = d->ny = n;
    d->hx = d->hy = 2 * radius / (n - 1);
    d->x0 = d->y0 = -radius;
    d->param1 = radius;
    d->cls.assign(static_cast<size_t>(n) * n, NodeClass::Exterior);
    const int m = (n - 1) / 2;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            // symmetric coordinates: exact negation pairs around the center
            double x = (i - m) * d->hx + (n % 2 == 0 ? -d->hx / 2 : 0.0);
            double y = (j - m) * d->hy + (n % 2 == 0 ? -d->hy / 2 : 0.0);
            if (x * x + y * y < radius * radius) d->cls[d->idx(i, j)] = NodeClass::Interior;
        }
    d->classify_masked();
    d->validate();
    return d;
}

std::shared_ptr<const GridDomain> GridDomain::annulus(double r_in, double r_out, int n) {
    require(r_in > 0 && r_out > 0, "annulus domain: radii must be positive");
    require(r_in < r_out, "annulus domain: r_in must be < r_out");
    require(n >= 3, "annulus domain: resolution must be >= 3");
    auto d = std::make_shared<GridDomain>();
    d->shape = Shape::Annulus;
    d->nx = d->ny = n;
    d->hx = d->hy = 2 * r_out / (n - 1);
    d->x0 = d->y0 = -r_out;
    d->param1 = r_in;
    d->param2 = r_out;
    d->cls.assign(static_cast<size_t>(n) * n, NodeClass::Exterior);
    const int m = (n - 1) / 2;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double x = (i - m) * d->hx + (n % 2 == 0 ? -d->hx / 2 : 0.0);
            double y = (j - m) * d->hy + (n % 2 == 0 ? -d->hy / 2 : 0.0);
            double r2 = x * x + y * y;
            if (r2 > r_in * r_in && r2 < r_out * r_out)
                d->cls[d->idx(i, j)] = NodeClass::Interior;
        }
    d->classify_masked();
    d->validate();
    return d;
}

void GridDomain::classify_masked() {
    // Boundary = non-interior node 8-adjacent to an interior node. The 8-way
    // fattening guarantees every cell incident to an interior node has
    // non-EXTERIOR corners.
    std::vector<NodeClass> out = cls;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (cls[idx(i, j)] == NodeClass::Interior) continue;
            bool touches = false;
            for (int dj = -1; dj <= 1 && !touches; ++dj)
                for (int di = -1; di <= 1 && !touches; ++di) {
                    if (di == 0 && dj == 0) continue;
                    int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
                    touches = cls[idx(ii, jj)] == NodeClass::Interior;
                }
            out[idx(i, j)] = touches ? NodeClass::Boundary : NodeClass::Exterior;
        }
    cls = out;
}

std::shared_ptr<const GridDomain> GridDomain::refine() const {
    switch (shape) {
        case Shape::Rect:
            return rect(x0, x0 + (nx - 1) * hx, y0, y0 + (ny - 1) * hy, 2 * nx - 1, 2 * ny - 1);
        case Shape::Slab:
            return slab(x0, x0 + (nx - 1) * hx, 2 * nx - 1, y0, 2 * ny, hy / 2);
        case Shape::Disk:
            return disk(param1, 2 * nx - 1);
        case Shape::Annulus:
            return annulus(param1, param2, 2 * nx - 1);
    }
    throw std::logic_error("refine: bad shape");
}

int GridDomain::count(NodeClass c) const {
    int k = 0;
    for (auto v : cls) k += (v == c);
    return k;
}

void GridDomain::validate() const {
    if (!(hx > 0 && hy > 0)) throw std::runtime_error("domain invariant: spacings must be positive");
    if (nx < 3 || ny < 3) throw std::runtime_error("domain invariant: nx, ny >= 3");
    if (cls.size() != static_cast<size_t>(nx) * ny)
        throw std::runtime_error("domain invariant: class array size mismatch");
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (cls[idx(i, j)] != NodeClass::Interior) continue;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k)
                if (at(i + di[k], j + dj[k]) == NodeClass::Exterior)
                    throw std::runtime_error("domain invariant: interior node has EXTERIOR axis neighbor");
        }
}

ScalarField::ScalarField(DomainPtr dom, double fill) : dom_(std::move(dom)) {
    v_.assign(static_cast<size_t>(dom_->size()), 0.0);
    if (fill != 0.0) {
        for (int n = 0; n < dom_->size(); ++n)
            if (dom_->cls[n] != NodeClass::Exterior) v_[n] = fill;
    }
}

void ScalarField::check_finite() const {
    for (int n = 0; n < dom_->size(); ++n)
        if (dom_->cls[n] != NodeClass::Exterior && !std::isfinite(v_[n]))
            throw std::runtime_error("field invariant: non-finite value at node " + std::to_string(n));
}

FieldNorms norms(const ScalarField& f) {
    const GridDomain& d = f.dom();
    FieldNorms out;
    double sum = 0;
    for (int n = 0; n < d.size(); ++n) {
        if (d.cls[n] == NodeClass::Exterior) continue;
        out.sup = std::max(out.sup, std::abs(f.at_idx(n)));
        if (d.cls[n] == NodeClass::Interior) sum += f.at_idx(n) * f.at_idx(n) * d.hx * d.hy;
    }
    out.weighted_l2 = std::sqrt(sum);
    return out;
}

std::vector<std::uint8_t> interior_core_mask(const GridDomain& dom, int width) {
    std::vector<std::uint8_t> m(dom.size(), 0);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            if (dom.cls[dom.idx(i, j)] != NodeClass::Interior) continue;
            bool core = true;
            for (int dj = -width; dj <= width && core; ++dj)
                for (int di = -width; di <= width && core; ++di)
                    core = dom.at(i + di, j + dj) == NodeClass::Interior;
            m[dom.idx(i, j)] = core ? 1 : 0;
        }
    return m;
}

double sup_interior(const ScalarField& f, int collar) {
    const GridDomain& d = f.dom();
    auto mask = interior_core_mask(d, collar);
    double s = 0;
    for (int n = 0; n < d.size(); ++n)
        if (mask[n]) s = std::max(s, std::abs(f.at_idx(n)));
    return s;
}

void save_field(const ScalarField& f, const std::string& path) {
    const GridDomain& d = f.dom();
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        char buf[256];
        std::snprintf(buf, sizeof buf, "# translator-field v1 nx=%d ny=%d hx=%.17g hy=%.17g shape=%s\n",
                      d.nx, d.ny, d.hx, d.hy, shape_name(d.shape).c_str());
        os << buf;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                int n = d.idx(i, j);
                std::snprintf(buf, sizeof buf, "%d %d %d %.17g\n", i, j,
                              static_cast<int>(d.cls[n]), f.at_idx(n));
                os << buf;
            }
        if (!os) throw std::runtime_error("write failure on '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

ScalarField load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error(path + ":1: missing header");
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    char shape_buf[32] = {0};
    if (std::sscanf(header.c_str(), "# translator-field v1 nx=%d ny=%d hx=%lg hy=%lg shape=%31s",
                    &nx, &ny, &hx, &hy, shape_buf) != 5)
        throw std::runtime_error(path + ":1: malformed header");
    if (nx < 3 || ny < 3 || !(hx > 0) || !(hy > 0))
        throw std::runtime_error(path + ":1: bad dimensions in header");
    Shape shape = shape_from_name(shape_buf);

    auto d = std::make_shared<GridDomain>();
    d->shape = shape;
    d->nx = nx;
    d->ny = ny;
    d->hx = hx;
    d->hy = hy;
    d->periodic_y = (shape == Shape::Slab);
    d->cls.assign(static_cast<size_t>(nx) * ny, NodeClass::Exterior);

    std::vector<double> vals(static_cast<size_t>(nx) * ny, 0.0);
    std::string line;
    long expected = static_cast<long>(nx) * ny;
    long count = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        int i, j, c;
        double v;
        if (std::sscanf(line.c_str(), "%d %d %d %lg", &i, &j, &c, &v) != 4)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed node line");
        if (i < 0 || i >= nx || j < 0 || j >= ny || c < 0 || c > 2)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": node index or class out of range");
        if (!std::isfinite(v))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-finite value");
        d->cls[d->idx(i, j)] = static_cast<NodeClass>(c);
        vals[d->idx(i, j)] = (c == 2) ? 0.0 : v;
        ++count;
    }
    if (count != expected)
        throw std::runtime_error(path + ": node count " + std::to_string(count) +
                                 " does not match header (" + std::to_string(expected) + ")");
    d->validate();
    ScalarField f(d);
    f.values() = std::move(vals);
    return f;
}

}  // namespace translab

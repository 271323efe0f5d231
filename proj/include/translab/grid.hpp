#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace translab {

enum class NodeClass : std::uint8_t { Interior = 0, Boundary = 1, Exterior = 2 };

enum class Shape : std::uint8_t { Rect = 0, Slab = 1, Disk = 2, Annulus = 3 };

std::string shape_name(Shape s);
Shape shape_from_name(const std::string& name);

/// Masked rectangular lattice over a planar domain. Nodes are classified
/// INTERIOR / BOUNDARY / EXTERIOR; SLAB domains are periodic in y.
class GridDomain {
public:
    Shape shape = Shape::Rect;
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    double x0 = 0, y0 = 0;
    bool periodic_y = false;
    double param1 = 0, param2 = 0;  // disk radius / annulus r_in, r_out
    std::vector<NodeClass> cls;

    static std::shared_ptr<const GridDomain> rect(double x0, double x1, double y0, double y1,
                                                  int nx, int ny);
    // Slab between x-walls, periodic in y with period ny*hy starting at y0.
    static std::shared_ptr<const GridDomain> slab(double x0, double x1, int nx,
                                                  double y0, int ny, double hy);
    static std::shared_ptr<const GridDomain> disk(double radius, int n);
    static std::shared_ptr<const GridDomain> annulus(double r_in, double r_out, int n);

    std::shared_ptr<const GridDomain> refine() const;

    int size() const { return nx * ny; }
    int idx(int i, int j) const { return j * nx + i; }
    double x(int i) const { return x0 + i * hx; }
    double y(int j) const { return y0 + j * hy; }

    // Class lookup with periodic wrap in j; out-of-range reads as EXTERIOR.
    NodeClass at(int i, int j) const {
        if (i < 0 || i >= nx) return NodeClass::Exterior;
        if (periodic_y) {
            j %= ny;
            if (j < 0) j += ny;
        } else if (j < 0 || j >= ny) {
            return NodeClass::Exterior;
        }
        return cls[static_cast<size_t>(j) * nx + i];
    }
    int wrapped_idx(int i, int j) const {
        if (periodic_y) {
            j %= ny;
            if (j < 0) j += ny;
        }
        return j * nx + i;
    }
    bool is_interior(int i, int j) const { return at(i, j) == NodeClass::Interior; }
    bool is_exterior(int i, int j) const { return at(i, j) == NodeClass::Exterior; }

    int count(NodeClass c) const;
    void validate() const;  // throws std::runtime_error on invariant violation

private:
    void classify_masked();  // boundary = non-interior 8-adjacent to interior
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Node-indexed real values over a GridDomain. Storage covers every lattice
/// node; EXTERIOR entries are kept at zero.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(DomainPtr dom, double fill = 0.0);

    const GridDomain& dom() const { return *dom_; }
    DomainPtr domain_ptr() const { return dom_; }

    double operator()(int i, int j) const { return v_[dom_->wrapped_idx(i, j)]; }
    double& operator()(int i, int j) { return v_[dom_->wrapped_idx(i, j)]; }
    double at_idx(int n) const { return v_[n]; }
    double& at_idx(int n) { return v_[n]; }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    void check_finite() const;  // all non-EXTERIOR values finite

private:
    DomainPtr dom_;
    std::vector<double> v_;
};

struct FieldNorms {
    double sup = 0;          // over non-EXTERIOR nodes
    double weighted_l2 = 0;  // sqrt(sum v^2 hx hy) over INTERIOR nodes
};

FieldNorms norms(const ScalarField& f);

// sup over interior nodes at lattice distance >= collar from any non-INTERIOR node
double sup_interior(const ScalarField& f, int collar = 0);

/// Field file format v1: header line then one `i j class value` line per node,
/// row-major, floats at 17 significant digits.
void save_field(const ScalarField& f, const std::string& path);
ScalarField load_field(const std::string& path);

// Nodes at lattice (Chebyshev) distance >= width from any non-INTERIOR node.
std::vector<std::uint8_t> interior_core_mask(const GridDomain& dom, int width);

}  // namespace translab

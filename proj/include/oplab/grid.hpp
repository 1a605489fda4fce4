#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "oplab/util.hpp"

namespace oplab {

struct EmptyBall : std::runtime_error {
    EmptyBall() : std::runtime_error("no grid node inside the requested ball") {}
};

/// Axis-aligned rectangle covered by a uniform node grid. Spacing is derived:
/// h = extent / (n - 1). Primary domains have n >= 3 per axis; staggered views
/// produced by staggered()/cell_centered() may go down to 2.
struct Domain {
    std::array<double, 2> origin{0.0, 0.0};
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> n{3, 3};

    int nx() const { return n[0]; }
    int ny() const { return n[1]; }
    int num_nodes() const { return n[0] * n[1]; }
    double h(int axis) const { return extent[axis] / (n[axis] - 1); }
    double hmin() const { return std::min(h(0), h(1)); }
    double hmax() const { return std::max(h(0), h(1)); }
    double area() const { return extent[0] * extent[1]; }
    double coord(int axis, int i) const { return origin[axis] + i * h(axis); }
    std::array<double, 2> node(int ix, int iy) const { return {coord(0, ix), coord(1, iy)}; }
    int index(int ix, int iy) const { return iy * n[0] + ix; }
    bool is_boundary(int ix, int iy) const {
        return ix == 0 || iy == 0 || ix == n[0] - 1 || iy == n[1] - 1;
    }

    bool same_geometry(const Domain& o) const {
        return origin == o.origin && extent == o.extent && n == o.n;
    }

    /// Shifted half a cell along `axis`; one node fewer there.
    Domain staggered(int axis) const {
        Domain d = *this;
        d.origin[axis] += 0.5 * h(axis);
        d.extent[axis] -= h(axis);
        d.n[axis] -= 1;
        assert(d.n[axis] >= 2);
        return d;
    }

    Domain cell_centered() const { return staggered(0).staggered(1); }

    void validate(int min_nodes = 3) const {
        if (!(extent[0] > 0.0) || !(extent[1] > 0.0))
            throw std::invalid_argument("Domain: extent must be strictly positive");
        if (n[0] < min_nodes || n[1] < min_nodes)
            throw std::invalid_argument("Domain: need at least " + std::to_string(min_nodes) +
                                        " nodes per axis");
    }
};

/// Real values on the nodes of a Domain, row-major (x fastest).
struct GridFunction {
    Domain domain;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(Domain d, std::vector<double> v) : domain(d), values(std::move(v)) {
        assert(int(values.size()) == domain.num_nodes());
    }

    double& at(int ix, int iy) { return values[std::size_t(domain.index(ix, iy))]; }
    double at(int ix, int iy) const { return values[std::size_t(domain.index(ix, iy))]; }

    static GridFunction zeros(const Domain& d) {
        return GridFunction(d, std::vector<double>(std::size_t(d.num_nodes()), 0.0));
    }
    static GridFunction constant(const Domain& d, double c) {
        return GridFunction(d, std::vector<double>(std::size_t(d.num_nodes()), c));
    }
    static GridFunction sample(const Domain& d,
                               const std::function<double(double, double)>& f) {
        GridFunction u = zeros(d);
        for (int iy = 0; iy < d.ny(); ++iy)
            for (int ix = 0; ix < d.nx(); ++ix)
                u.at(ix, iy) = f(d.coord(0, ix), d.coord(1, iy));
        return u;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Per-axis forward differences; component i lives at cell centers along its
/// own axis (one node shorter there), nodes along the other.
struct VectorField {
    Domain domain; // domain of the parent node function
    std::vector<double> c1;   // size (nx-1) * ny, index iy*(nx-1) + ix
    std::vector<double> c2;   // size nx * (ny-1), index iy*nx + ix

    double d1(int ix, int iy) const { return c1[std::size_t(iy) * (domain.nx() - 1) + ix]; }
    double d2(int ix, int iy) const { return c2[std::size_t(iy) * domain.nx() + ix]; }
    double& d1(int ix, int iy) { return c1[std::size_t(iy) * (domain.nx() - 1) + ix]; }
    double& d2(int ix, int iy) { return c2[std::size_t(iy) * domain.nx() + ix]; }

    /// Component as a GridFunction on its staggered domain.
    GridFunction component_grid(int axis) const {
        Domain d = domain.staggered(axis);
        return GridFunction(d, axis == 0 ? c1 : c2);
    }
};

struct BallSpec {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;

    void validate() const {
        if (!(radius > 0.0)) throw std::invalid_argument("BallSpec: radius must be positive");
    }
};

inline double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

/// True when the closed ball plus `margin` is contained in the domain.
bool ball_in_domain(const Domain& d, const BallSpec& b, double margin = 0.0);

/// Flattened node indices (row-major order). Always sorted ascending.
using IndexSet = std::vector<int>;

VectorField discrete_gradient(const GridFunction& u);

/// Nodes with |x - center| <= radius.
IndexSet ball_nodes(const Domain& d, const BallSpec& b);

/// ball_nodes(outer) \ ball_nodes(inner); centers must coincide and
/// inner.radius < outer.radius.
IndexSet annulus_nodes(const Domain& d, const BallSpec& outer, const BallSpec& inner);

/// One-cell-wide discrete circle: radius - band/2 < |x - center| <= radius + band/2.
/// band <= 0 selects the default band = max grid spacing.
IndexSet circle_nodes(const Domain& d, const BallSpec& b, double band = 0.0);

/// Discrete convolution with a compactly supported nonnegative bump of radius
/// eps, weights renormalized to sum 1 (also near the boundary, where the
/// kernel is truncated). eps below one cell returns u unchanged.
GridFunction mollify(const GridFunction& u, double eps);

/// Swap the two axes (values transposed, geometry swapped).
GridFunction transpose(const GridFunction& u);

/// Quadrature weight of a forward-difference site of `axis` whose transverse
/// node index is j: h0*h1, halved on the transverse boundary rows so that
/// per-axis sums reproduce integrals of fields constant in the axis direction
/// exactly (trapezoidal rule transversally).
double edge_weight(const Domain& d, int axis, int j_transverse);

/// C1 radial cutoff: 1 on |x-c| <= plateau, 0 on |x-c| >= outer.radius,
/// cubic smoothstep in between.
GridFunction make_radial_cutoff(const Domain& d, const BallSpec& outer, double plateau_radius);

} // namespace oplab

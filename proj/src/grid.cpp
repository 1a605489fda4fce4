#include "oplab/grid.hpp"

#include <algorithm>

namespace oplab {

bool ball_in_domain(const Domain& d, const BallSpec& b, double margin) {
    const double r = b.radius + margin;
    return b.center[0] - r >= d.origin[0] && b.center[0] + r <= d.origin[0] + d.extent[0] &&
           b.center[1] - r >= d.origin[1] && b.center[1] + r <= d.origin[1] + d.extent[1];
}

VectorField discrete_gradient(const GridFunction& u) {
    const Domain& d = u.domain;
    VectorField g;
    g.domain = d;
    g.c1.assign(std::size_t(d.nx() - 1) * d.ny(), 0.0);
    g.c2.assign(std::size_t(d.nx()) * (d.ny() - 1), 0.0);
    const double hx = d.h(0), hy = d.h(1);
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix + 1 < d.nx(); ++ix)
            g.d1(ix, iy) = (u.at(ix + 1, iy) - u.at(ix, iy)) / hx;
    for (int iy = 0; iy + 1 < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            g.d2(ix, iy) = (u.at(ix, iy + 1) - u.at(ix, iy)) / hy;
    return g;
}

IndexSet ball_nodes(const Domain& d, const BallSpec& b) {
    IndexSet out;
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            if (dist(d.node(ix, iy), b.center) <= b.radius) out.push_back(d.index(ix, iy));
    return out;
}

IndexSet annulus_nodes(const Domain& d, const BallSpec& outer, const BallSpec& inner) {
    if (inner.center != outer.center)
        throw std::invalid_argument("annulus_nodes: centers must coincide");
    if (!(inner.radius < outer.radius))
        throw std::invalid_argument("annulus_nodes: inner radius must be smaller");
    IndexSet out;
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix) {
            const double r = dist(d.node(ix, iy), outer.center);
            if (r > inner.radius && r <= outer.radius) out.push_back(d.index(ix, iy));
        }
    return out;
}

IndexSet circle_nodes(const Domain& d, const BallSpec& b, double band) {
    if (band <= 0.0) band = d.hmax();
    IndexSet out;
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix) {
            const double r = dist(d.node(ix, iy), b.center);
            if (r > b.radius - 0.5 * band && r <= b.radius + 0.5 * band)
                out.push_back(d.index(ix, iy));
        }
    return out;
}

GridFunction mollify(const GridFunction& u, double eps) {
    if (eps < 0.0) throw std::invalid_argument("mollify: eps must be nonnegative");
    const Domain& d = u.domain;
    if (eps < d.hmin()) return u;

    const double hx = d.h(0), hy = d.h(1);
    const int rx = int(std::floor(eps / hx));
    const int ry = int(std::floor(eps / hy));

    // Bump (1 - (r/eps)^2)^2 on r < eps; offsets and weights are shared by all
    // interior targets, truncated and renormalized near the boundary.
    struct Tap { int dx, dy; double w; };
    std::vector<Tap> taps;
    for (int dy = -ry; dy <= ry; ++dy)
        for (int dx = -rx; dx <= rx; ++dx) {
            const double r = std::hypot(dx * hx, dy * hy);
            if (r < eps) {
                const double t = 1.0 - (r / eps) * (r / eps);
                taps.push_back({dx, dy, t * t});
            }
        }

    GridFunction out = GridFunction::zeros(d);
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix) {
            double acc = 0.0, wsum = 0.0;
            for (const Tap& t : taps) {
                const int jx = ix + t.dx, jy = iy + t.dy;
                if (jx < 0 || jy < 0 || jx >= d.nx() || jy >= d.ny()) continue;
                acc += t.w * u.at(jx, jy);
                wsum += t.w;
            }
            out.at(ix, iy) = acc / wsum;
        }
    return out;
}

GridFunction transpose(const GridFunction& u) {
    Domain d = u.domain;
    std::swap(d.origin[0], d.origin[1]);
    std::swap(d.extent[0], d.extent[1]);
    std::swap(d.n[0], d.n[1]);
    GridFunction out = GridFunction::zeros(d);
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            out.at(ix, iy) = u.at(iy, ix);
    return out;
}

double edge_weight(const Domain& d, int axis, int j_transverse) {
    const int other = 1 - axis;
    const double w = d.h(0) * d.h(1);
    return (j_transverse == 0 || j_transverse == d.n[other] - 1) ? 0.5 * w : w;
}

GridFunction make_radial_cutoff(const Domain& d, const BallSpec& outer, double plateau_radius) {
    if (!(plateau_radius < outer.radius))
        throw std::invalid_argument("make_radial_cutoff: plateau must be inside the ball");
    return GridFunction::sample(d, [&](double x, double y) {
        const double r = std::hypot(x - outer.center[0], y - outer.center[1]);
        if (r <= plateau_radius) return 1.0;
        if (r >= outer.radius) return 0.0;
        const double t = (outer.radius - r) / (outer.radius - plateau_radius);
        return t * t * (3.0 - 2.0 * t);
    });
}

} // namespace oplab

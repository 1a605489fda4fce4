#include "oplab/energy.hpp"

namespace oplab {

const char* regime_name(Regime r) {
    return r == Regime::Degenerate ? "degenerate" : "singular";
}

Regime regime_from_name(const std::string& s) {
    if (s == "degenerate") return Regime::Degenerate;
    if (s == "singular") return Regime::Singular;
    throw std::invalid_argument("unknown regime: " + s);
}

namespace {

// Applies f(weight, difference) to every forward-difference site of u.
template <typename F>
void for_each_edge(const GridFunction& u, F&& f) {
    const Domain& d = u.domain;
    const double hx = d.h(0), hy = d.h(1);
    for (int iy = 0; iy < d.ny(); ++iy) {
        const double w = edge_weight(d, 0, iy);
        for (int ix = 0; ix + 1 < d.nx(); ++ix)
            f(0, ix, iy, w, (u.at(ix + 1, iy) - u.at(ix, iy)) / hx);
    }
    for (int iy = 0; iy + 1 < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            f(1, ix, iy, edge_weight(d, 1, ix), (u.at(ix, iy + 1) - u.at(ix, iy)) / hy);
}

} // namespace

EnergyValue energy_orthotropic(const ProblemSpec& spec, const GridFunction& u) {
    if (!u.domain.same_geometry(spec.domain))
        throw std::invalid_argument("energy: grid mismatch");
    const double p = spec.p;
    SumAccumulator ax[2];
    for_each_edge(u, [&](int axis, int, int, double w, double d) {
        ax[axis].add(w * pow_abs(d, p));
    });
    EnergyValue e;
    e.per_axis = {ax[0].reduce() / p, ax[1].reduce() / p};
    e.eps_part = 0.0;
    e.total = e.per_axis[0] + e.per_axis[1] + e.eps_part;
    return e;
}

EnergyValue energy_regularized(const ProblemSpec& spec, const GridFunction& u) {
    if (!u.domain.same_geometry(spec.domain))
        throw std::invalid_argument("energy: grid mismatch");
    const double p = spec.p, eps = spec.eps;
    EnergyValue e;
    if (spec.regime == Regime::Degenerate) {
        SumAccumulator ax[2], quad;
        for_each_edge(u, [&](int axis, int, int, double w, double d) {
            ax[axis].add(w * pow_abs(d, p));
            quad.add(w * d * d);
        });
        e.per_axis = {ax[0].reduce() / p, ax[1].reduce() / p};
        e.eps_part = 0.5 * (p - 1.0) * eps * quad.reduce();
    } else {
        SumAccumulator ax[2];
        for_each_edge(u, [&](int axis, int, int, double w, double d) {
            ax[axis].add(w * std::pow(eps + d * d, 0.5 * p));
        });
        e.per_axis = {ax[0].reduce() / p, ax[1].reduce() / p};
        e.eps_part = 0.0;
    }
    e.total = e.per_axis[0] + e.per_axis[1] + e.eps_part;
    return e;
}

double flux_value(const ProblemSpec& spec, double t) {
    if (spec.regime == Regime::Degenerate)
        return (pow_abs(t, spec.p - 2.0) + (spec.p - 1.0) * spec.eps) * t;
    return std::pow(spec.eps + t * t, 0.5 * (spec.p - 2.0)) * t;
}

double flux_derivative(const ProblemSpec& spec, double t) {
    const double p = spec.p, eps = spec.eps;
    if (spec.regime == Regime::Degenerate)
        return (p - 1.0) * (pow_abs(t, p - 2.0) + eps);
    const double s = eps + t * t;
    return std::pow(s, 0.5 * (p - 4.0)) * (eps + (p - 1.0) * t * t);
}

namespace {

// Shared divergence assembly: given a per-edge scalar s(axis, d), accumulates
// +- w*s/h into the two endpoint nodes and zeroes the boundary afterwards.
template <typename EdgeFn>
GridFunction assemble_divergence(const GridFunction& u, EdgeFn&& edge_value) {
    const Domain& d = u.domain;
    GridFunction out = GridFunction::zeros(d);
    const double hx = d.h(0), hy = d.h(1);
    for (int iy = 0; iy < d.ny(); ++iy) {
        const double w = edge_weight(d, 0, iy);
        for (int ix = 0; ix + 1 < d.nx(); ++ix) {
            const double s = w * edge_value(0, ix, iy) / hx;
            out.at(ix, iy) -= s;
            out.at(ix + 1, iy) += s;
        }
    }
    for (int iy = 0; iy + 1 < d.ny(); ++iy) {
        for (int ix = 0; ix < d.nx(); ++ix) {
            const double w = edge_weight(d, 1, ix);
            const double s = w * edge_value(1, ix, iy) / hy;
            out.at(ix, iy) -= s;
            out.at(ix, iy + 1) += s;
        }
    }
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            if (d.is_boundary(ix, iy)) out.at(ix, iy) = 0.0;
    return out;
}

} // namespace

GridFunction energy_gradient(const ProblemSpec& spec, const GridFunction& u) {
    if (!u.domain.same_geometry(spec.domain))
        throw std::invalid_argument("energy_gradient: grid mismatch");
    // Unlike the Hessian weights, the singular flux stays finite at eps = 0
    // (|t|^{p-1} -> 0 as t -> 0), so no regime guard is needed here.
    const VectorField g = discrete_gradient(u);
    return assemble_divergence(u, [&](int axis, int ix, int iy) {
        return flux_value(spec, axis == 0 ? g.d1(ix, iy) : g.d2(ix, iy));
    });
}

GridFunction hessian_apply(const ProblemSpec& spec, const GridFunction& u,
                           const GridFunction& w) {
    if (!u.domain.same_geometry(spec.domain) || !w.domain.same_geometry(spec.domain))
        throw std::invalid_argument("hessian_apply: grid mismatch");
    if (spec.regime == Regime::Singular && spec.eps == 0.0)
        throw std::invalid_argument("hessian_apply: singular regime requires eps > 0");
    const VectorField gu = discrete_gradient(u);
    const VectorField gw = discrete_gradient(w);
    return assemble_divergence(u, [&](int axis, int ix, int iy) {
        const double du = axis == 0 ? gu.d1(ix, iy) : gu.d2(ix, iy);
        const double dw = axis == 0 ? gw.d1(ix, iy) : gw.d2(ix, iy);
        return flux_derivative(spec, du) * dw;
    });
}

double dirichlet_quadratic(const GridFunction& u) {
    SumAccumulator acc;
    for_each_edge(u, [&](int, int, int, double w, double d) { acc.add(w * d * d); });
    return acc.reduce();
}

} // namespace oplab

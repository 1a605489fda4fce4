#include "oplab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oplab {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

NonlinearGradient nonlinear_gradient(const GridFunction& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("nonlinear_gradient: p must exceed 1");
    const VectorField g = discrete_gradient(u);
    NonlinearGradient out;
    out.p = p;
    out.identity_regime = p <= 2.0;
    out.v1 = g.component_grid(0);
    out.v2 = g.component_grid(1);
    if (p > 2.0) {
        const double m = 0.5 * (p - 2.0);
        for (double& t : out.v1.values) t = g_q(m, t);
        for (double& t : out.v2.values) t = g_q(m, t);
    }
    return out;
}

double infimum_on_ball(const GridFunction& f, const BallSpec& b) {
    const IndexSet nodes = ball_nodes(f.domain, b);
    if (nodes.empty()) throw EmptyBall();
    double m = f.values[std::size_t(nodes[0])];
    for (int i : nodes) m = std::min(m, f.values[std::size_t(i)]);
    return m;
}

double supremum_on_ball(const GridFunction& f, const BallSpec& b) {
    const IndexSet nodes = ball_nodes(f.domain, b);
    if (nodes.empty()) throw EmptyBall();
    double m = f.values[std::size_t(nodes[0])];
    for (int i : nodes) m = std::max(m, f.values[std::size_t(i)]);
    return m;
}

double oscillation(const GridFunction& f, const BallSpec& b) {
    const IndexSet nodes = ball_nodes(f.domain, b);
    if (nodes.empty()) throw EmptyBall();
    double lo = f.values[std::size_t(nodes[0])], hi = lo;
    for (int i : nodes) {
        const double v = f.values[std::size_t(i)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

GridFunction gradient_magnitude_cells(const GridFunction& u) {
    const VectorField g = discrete_gradient(u);
    const Domain cells = u.domain.cell_centered();
    GridFunction out = GridFunction::zeros(cells);
    for (int iy = 0; iy < cells.ny(); ++iy)
        for (int ix = 0; ix < cells.nx(); ++ix) {
            const double d1 = 0.5 * (g.d1(ix, iy) + g.d1(ix, iy + 1));
            const double d2 = 0.5 * (g.d2(ix, iy) + g.d2(ix + 1, iy));
            out.at(ix, iy) = std::hypot(d1, d2);
        }
    return out;
}

double lipschitz_scale(const GridFunction& u, const BallSpec& b) {
    return 1.0 + supremum_on_ball(gradient_magnitude_cells(u), b);
}

BallStats ball_stats(const GridFunction& u, const NonlinearGradient& ng, const BallSpec& b) {
    BallStats s;
    for (int j = 0; j < 2; ++j) {
        const GridFunction& v = ng.component(j);
        s.m[std::size_t(j)] = infimum_on_ball(v, b);
        s.M[std::size_t(j)] = oscillation(v, b);
    }
    s.L_R = lipschitz_scale(u, b);
    return s;
}

double level_exponent(double p, Regime regime) {
    if (regime == Regime::Degenerate) return 2.0 * p + 4.0 * (1.0 - 2.0 / p);
    return 2.0;
}

DeGiorgiParams derive_degiorgi(double alpha, double C0, double p, Regime regime, double L_R,
                               double M) {
    DeGiorgiParams par;
    par.alpha = alpha;
    par.C0 = C0;
    par.validate();
    if (regime == Regime::Degenerate) {
        par.nu = std::pow(2.0, -6.0 * (p + 4.0)) / (C0 * C0 * kPi) *
                 std::pow(L_R, 4.0 - p * p - 2.0 * p);
    } else {
        par.nu = (1.0 / 256.0) / (C0 * C0 * kPi) / (L_R * L_R);
    }
    par.delta = std::sqrt(0.5 * par.nu * pow_abs(M, level_exponent(p, regime)));
    return par;
}

LevelCheckResult degiorgi_level_check(const GridFunction& v_component, const BallSpec& b,
                                      const DeGiorgiParams& params, double p, Regime regime) {
    params.validate();
    const IndexSet nodes = ball_nodes(v_component.domain, b);
    if (nodes.empty()) throw EmptyBall();

    LevelCheckResult r;
    double lo = v_component.values[std::size_t(nodes[0])], hi = lo;
    for (int i : nodes) {
        const double v = v_component.values[std::size_t(i)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    r.M = hi - lo;
    if (r.M == 0.0) {
        r.verdict = LevelVerdict::TrivialHolds;
        return r;
    }

    int above = 0;
    const double level = lo + (1.0 - params.alpha) * r.M;
    for (int i : nodes)
        if (v_component.values[std::size_t(i)] > level) ++above;
    r.fraction = double(above) / double(nodes.size());
    r.threshold = params.nu * pow_abs(r.M, level_exponent(p, regime));

    if (r.fraction > r.threshold) {
        r.verdict = LevelVerdict::HypothesisFails;
        return r;
    }

    const BallSpec half{b.center, 0.5 * b.radius};
    const IndexSet half_nodes = ball_nodes(v_component.domain, half);
    double sup_v = lo;
    for (int i : half_nodes) sup_v = std::max(sup_v, v_component.values[std::size_t(i)]);
    r.half_osc = sup_v - lo;
    r.bound = (1.0 - 0.5 * params.alpha) * r.M;
    r.verdict = r.half_osc <= r.bound + 1e-12 * r.M ? LevelVerdict::HoldsAndConcludes
                                                    : LevelVerdict::Violation;
    return r;
}

namespace {

// Sum of w * d^2 over difference sites of f whose midpoints satisfy `keep`.
template <typename Pred>
double dirichlet_restricted(const GridFunction& f, Pred&& keep) {
    const Domain& d = f.domain;
    const double hx = d.h(0), hy = d.h(1);
    SumAccumulator acc;
    for (int iy = 0; iy < d.ny(); ++iy) {
        const double w = edge_weight(d, 0, iy);
        const double y = d.coord(1, iy);
        for (int ix = 0; ix + 1 < d.nx(); ++ix) {
            const double x = d.coord(0, ix) + 0.5 * hx;
            if (!keep(x, y)) continue;
            const double diff = (f.at(ix + 1, iy) - f.at(ix, iy)) / hx;
            acc.add(w * diff * diff);
        }
    }
    for (int iy = 0; iy + 1 < d.ny(); ++iy) {
        const double y = d.coord(1, iy) + 0.5 * hy;
        for (int ix = 0; ix < d.nx(); ++ix) {
            const double x = d.coord(0, ix);
            if (!keep(x, y)) continue;
            const double w = edge_weight(d, 1, ix);
            const double diff = (f.at(ix, iy + 1) - f.at(ix, iy)) / hy;
            acc.add(w * diff * diff);
        }
    }
    return acc.reduce();
}

} // namespace

double dirichlet_on_ball(const GridFunction& f, const BallSpec& b) {
    return dirichlet_restricted(f, [&](double x, double y) {
        return std::hypot(x - b.center[0], y - b.center[1]) <= b.radius;
    });
}

double dirichlet_on_annulus(const GridFunction& f, const std::array<double, 2>& center,
                            double r_inner, double r_outer) {
    return dirichlet_restricted(f, [&](double x, double y) {
        const double r = std::hypot(x - center[0], y - center[1]);
        return r > r_inner && r <= r_outer;
    });
}

AlternativeReport alternatives_diagnose(const GridFunction& v_component, const BallSpec& b,
                                        const DeGiorgiParams& params, double p, Regime regime) {
    params.validate();
    AlternativeReport rep;
    rep.M = oscillation(v_component, b);
    const double expo = level_exponent(p, regime);
    rep.delta = std::sqrt(0.5 * params.nu * pow_abs(rep.M, expo));
    rep.quantum = params.nu * rep.M * rep.M * pow_abs(rep.M, expo) / (512.0 * kPi);

    const BallSpec shrunk{b.center, rep.delta * b.radius};
    const IndexSet inner = ball_nodes(v_component.domain, shrunk);
    if (inner.empty()) {
        rep.shrunk_ball_empty = true;
        rep.osc_shrunk = 0.0;
        rep.b1 = true; // vacuous on an empty shrunk ball
    } else {
        rep.osc_shrunk = oscillation(v_component, shrunk);
        rep.b1 = rep.osc_shrunk <= (7.0 / 8.0) * rep.M * (1.0 + 1e-12);
    }
    rep.annulus_energy =
        dirichlet_on_annulus(v_component, b.center, rep.delta * b.radius, b.radius);
    rep.b2 = rep.annulus_energy >= rep.quantum * (1.0 - 1e-12);
    return rep;
}

OscillationTrace decay_trace(const GridFunction& u, double p, Regime regime,
                             std::array<double, 2> x0, double R0, double alpha, double C0,
                             int j, int max_stages) {
    const double floor = 3.0 * u.domain.hmax();
    if (R0 < floor) throw BallTooSmall();
    const BallSpec b0{x0, R0};
    if (!ball_in_domain(u.domain, b0))
        throw std::invalid_argument("decay_trace: initial ball leaves the domain");

    const NonlinearGradient ng = nonlinear_gradient(u, p);
    const GridFunction& v = ng.component(j);

    OscillationTrace trace;
    trace.initial_dirichlet = dirichlet_on_ball(v, b0);

    double R = R0;
    for (int n = 0; n < max_stages; ++n) {
        TraceStage st;
        st.n = n;
        st.R = R;
        const BallSpec ball{x0, R};
        st.M = oscillation(v, ball);
        st.L = lipschitz_scale(u, ball);
        if (st.M <= 0.0) {
            st.alternative = "stopped";
            trace.stages.push_back(st);
            trace.stop_reason = "zero oscillation";
            return trace;
        }
        const DeGiorgiParams par = derive_degiorgi(alpha, C0, p, regime, st.L, st.M);
        st.nu = par.nu;
        st.delta = par.delta;

        const AlternativeReport rep = alternatives_diagnose(v, ball, par, p, regime);
        st.annulus_energy = rep.annulus_energy;
        st.quantum = rep.quantum;
        if (rep.b2) {
            st.alternative = "B2";
            trace.b2_energy_sum += rep.annulus_energy;
        } else if (rep.b1) {
            st.alternative = "B1";
        } else {
            st.alternative = "violation";
            trace.dichotomy_violation = true;
            trace.stages.push_back(st);
            trace.stop_reason = "dichotomy violation";
            return trace;
        }
        trace.stages.push_back(st);

        const double R_next = par.delta * R;
        if (R_next < floor) {
            trace.stop_reason = "resolution floor";
            return trace;
        }
        R = R_next;
    }
    trace.stop_reason = "max stages";
    return trace;
}

ApLipschitzResult apriori_lipschitz_check(const GridFunction& u, double p, const BallSpec& b) {
    if (!ball_in_domain(u.domain, BallSpec{b.center, 2.0 * b.radius}))
        throw std::invalid_argument("apriori check: 2b must stay inside the domain");
    ApLipschitzResult r;
    const NonlinearGradient raw = nonlinear_gradient(u, 2.0); // plain differences
    const BallSpec half{b.center, 0.5 * b.radius};
    for (int j = 0; j < 2; ++j) {
        const GridFunction& dj = raw.component(j);
        const IndexSet nodes = ball_nodes(dj.domain, half);
        if (nodes.empty()) throw EmptyBall();
        double s = 0.0;
        for (int i : nodes) s = std::max(s, std::abs(dj.values[std::size_t(i)]));
        r.sup_half[std::size_t(j)] = s;
    }

    const GridFunction mag = gradient_magnitude_cells(u);
    const IndexSet cells = ball_nodes(mag.domain, b);
    if (cells.empty()) throw EmptyBall();
    SumAccumulator acc;
    for (int i : cells) acc.add(pow_abs(mag.values[std::size_t(i)], p));
    r.mean_p = acc.reduce() / double(cells.size());
    if (r.mean_p < 1e-300) {
        r.ratio = 0.0;
        return r;
    }
    r.ratio = std::max(r.sup_half[0], r.sup_half[1]) / std::pow(r.mean_p, 1.0 / p);
    return r;
}

ApSobolevResult apriori_sobolev_check(const GridFunction& u, double p, double alpha,
                                      const BallSpec& b) {
    if (!(alpha >= 0.5 * p))
        throw std::invalid_argument("apriori_sobolev_check: alpha must be >= p/2");
    if (!ball_in_domain(u.domain, BallSpec{b.center, 2.0 * b.radius}))
        throw std::invalid_argument("apriori check: 2b must stay inside the domain");

    const VectorField g = discrete_gradient(u);
    const BallSpec half{b.center, 0.5 * b.radius};
    ApSobolevResult r;
    for (int j = 0; j < 2; ++j) {
        GridFunction t = g.component_grid(j);
        for (double& v : t.values) v = g_q(alpha - 1.0, v);
        r.numerator += dirichlet_on_ball(t, half);
    }

    const GridFunction mag = gradient_magnitude_cells(u);
    const IndexSet cells = ball_nodes(mag.domain, b);
    if (cells.empty()) throw EmptyBall();
    SumAccumulator acc;
    for (int i : cells) acc.add(pow_abs(mag.values[std::size_t(i)], p));
    const double mean_p = acc.reduce() / double(cells.size());
    if (mean_p < 1e-300) {
        r.ratio = 0.0;
        r.denominator = 0.0;
        return r;
    }
    r.denominator = std::pow(mean_p, 2.0 * alpha / p);
    r.ratio = r.numerator / r.denominator;
    return r;
}

void PhiSpec::validate() const {
    if (kind == Kind::OddPower && !(param >= 1.0))
        throw CatalogueMiss("PhiSpec: odd power needs exponent >= 1");
    if ((kind == Kind::Exp || kind == Kind::Cosh) && !(param > 0.0))
        throw CatalogueMiss("PhiSpec: rate must be positive");
}

double PhiSpec::value(double t) const {
    switch (kind) {
    case Kind::Identity: return t;
    case Kind::OddPower: return g_q(param, t);
    case Kind::Exp: return std::exp(param * t);
    case Kind::Cosh: return std::cosh(param * t);
    }
    return 0.0;
}

double PhiSpec::deriv(double t) const {
    switch (kind) {
    case Kind::Identity: return 1.0;
    case Kind::OddPower: return (param + 1.0) * pow_abs(t, param);
    case Kind::Exp: return param * std::exp(param * t);
    case Kind::Cosh: return param * std::sinh(param * t);
    }
    return 0.0;
}

void ZetaSpec::validate() const {
    if (kind == Kind::Constant && !(param >= 0.0))
        throw CatalogueMiss("ZetaSpec: constant must be nonnegative");
}

double ZetaSpec::value(double t) const {
    switch (kind) {
    case Kind::Constant: return param;
    case Kind::ShiftedSquarePlus: {
        const double g = std::max(t - param, 0.0);
        return g * g;
    }
    case Kind::Square: return t * t;
    }
    return 0.0;
}

namespace {

// Everything the Caccioppoli ratios need, co-located at cell centers.
struct CellFields {
    Domain cells;
    GridFunction du1, du2;     // transverse-averaged per-axis differences
    GridFunction eta, ex, ey;  // cutoff, cell-centered cutoff gradient
    GridFunction hess_abs;     // |D^2 eta| surrogate at cells
};

CellFields make_cell_fields(const GridFunction& u, const GridFunction& eta) {
    if (!eta.domain.same_geometry(u.domain))
        throw std::invalid_argument("caccioppoli: cutoff grid mismatch");
    const Domain& d = u.domain;
    const double hx = d.h(0), hy = d.h(1);
    const VectorField g = discrete_gradient(u);

    CellFields f;
    f.cells = d.cell_centered();
    f.du1 = GridFunction::zeros(f.cells);
    f.du2 = GridFunction::zeros(f.cells);
    f.eta = GridFunction::zeros(f.cells);
    f.ex = GridFunction::zeros(f.cells);
    f.ey = GridFunction::zeros(f.cells);
    f.hess_abs = GridFunction::zeros(f.cells);

    // Node-based pure second differences, zero where the stencil leaves the
    // grid (the cutoff vanishes there anyway).
    GridFunction exx = GridFunction::zeros(d), eyy = GridFunction::zeros(d);
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 1; ix + 1 < d.nx(); ++ix)
            exx.at(ix, iy) = (eta.at(ix + 1, iy) - 2.0 * eta.at(ix, iy) + eta.at(ix - 1, iy)) /
                             (hx * hx);
    for (int iy = 1; iy + 1 < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            eyy.at(ix, iy) = (eta.at(ix, iy + 1) - 2.0 * eta.at(ix, iy) + eta.at(ix, iy - 1)) /
                             (hy * hy);

    for (int iy = 0; iy < f.cells.ny(); ++iy)
        for (int ix = 0; ix < f.cells.nx(); ++ix) {
            f.du1.at(ix, iy) = 0.5 * (g.d1(ix, iy) + g.d1(ix, iy + 1));
            f.du2.at(ix, iy) = 0.5 * (g.d2(ix, iy) + g.d2(ix + 1, iy));
            f.eta.at(ix, iy) = 0.25 * (eta.at(ix, iy) + eta.at(ix + 1, iy) +
                                       eta.at(ix, iy + 1) + eta.at(ix + 1, iy + 1));
            f.ex.at(ix, iy) = 0.5 *
                              ((eta.at(ix + 1, iy) + eta.at(ix + 1, iy + 1)) -
                               (eta.at(ix, iy) + eta.at(ix, iy + 1))) /
                              hx;
            f.ey.at(ix, iy) = 0.5 *
                              ((eta.at(ix, iy + 1) + eta.at(ix + 1, iy + 1)) -
                               (eta.at(ix, iy) + eta.at(ix + 1, iy))) /
                              hy;
            const double cxx = 0.25 * (exx.at(ix, iy) + exx.at(ix + 1, iy) +
                                       exx.at(ix, iy + 1) + exx.at(ix + 1, iy + 1));
            const double cyy = 0.25 * (eyy.at(ix, iy) + eyy.at(ix + 1, iy) +
                                       eyy.at(ix, iy + 1) + eyy.at(ix + 1, iy + 1));
            const double cxy = (eta.at(ix + 1, iy + 1) - eta.at(ix, iy + 1) -
                                eta.at(ix + 1, iy) + eta.at(ix, iy)) /
                               (hx * hy);
            f.hess_abs.at(ix, iy) = std::sqrt(cxx * cxx + 2.0 * cxy * cxy + cyy * cyy);
        }
    return f;
}

// Forward difference of a cell field along `axis`, one-sided (backward) at
// the far edge; the cutoff masks that edge in every use below.
GridFunction cell_forward_diff(const GridFunction& c, int axis) {
    const Domain& d = c.domain;
    const double h = d.h(axis);
    GridFunction out = GridFunction::zeros(d);
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix) {
            if (axis == 0) {
                if (ix + 1 < d.nx())
                    out.at(ix, iy) = (c.at(ix + 1, iy) - c.at(ix, iy)) / h;
                else
                    out.at(ix, iy) = (c.at(ix, iy) - c.at(ix - 1, iy)) / h;
            } else {
                if (iy + 1 < d.ny())
                    out.at(ix, iy) = (c.at(ix, iy + 1) - c.at(ix, iy)) / h;
                else
                    out.at(ix, iy) = (c.at(ix, iy) - c.at(ix, iy - 1)) / h;
            }
        }
    return out;
}

double finish_ratio(CaccioppoliResult& r) {
    if (r.rhs > 0.0)
        r.ratio = r.lhs / r.rhs;
    else
        r.ratio = r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return r.ratio;
}

} // namespace

CaccioppoliResult caccioppoli_ratio_degenerate(const GridFunction& u, double p,
                                               const PhiSpec& phi, const ZetaSpec& zeta,
                                               const GridFunction& eta, int j, int k) {
    if (!(p > 2.0))
        throw std::invalid_argument("caccioppoli_ratio_degenerate: needs p > 2");
    phi.validate();
    zeta.validate();
    const CellFields f = make_cell_fields(u, eta);
    const double w = u.domain.h(0) * u.domain.h(1);
    const double m = 0.5 * (p - 2.0);

    GridFunction v[2] = {f.du1, f.du2};
    for (int i = 0; i < 2; ++i)
        for (double& t : v[i].values) t = g_q(m, t);

    const GridFunction* duk = k == 0 ? &f.du1 : &f.du2;
    const GridFunction* duj = j == 0 ? &f.du1 : &f.du2;

    SumAccumulator lhs_acc, rhs_a, rhs_b;
    for (int i = 0; i < 2; ++i) {
        const GridFunction vik = cell_forward_diff(v[i], k);
        const GridFunction& dui = i == 0 ? f.du1 : f.du2;
        const GridFunction& ei = i == 0 ? f.ex : f.ey;
        for (std::size_t c = 0; c < std::size_t(f.cells.num_nodes()); ++c) {
            const double zc = zeta.value(duj->values[c]);
            const double pd = phi.deriv(duk->values[c]);
            lhs_acc.add(w * vik.values[c] * vik.values[c] * pd * pd * zc * f.eta.values[c] *
                        f.eta.values[c]);
            const double weight = pow_abs(dui.values[c], p - 2.0) * ei.values[c] * ei.values[c];
            const double pv = phi.value(duk->values[c]);
            rhs_a.add(w * weight * pv * pv * pv * pv);
            rhs_b.add(w * weight * zc * zc);
        }
    }
    CaccioppoliResult r;
    r.lhs = lhs_acc.reduce();
    r.rhs = std::sqrt(std::max(rhs_a.reduce(), 0.0)) * std::sqrt(std::max(rhs_b.reduce(), 0.0));
    finish_ratio(r);
    return r;
}

CaccioppoliResult caccioppoli_ratio_singular(const GridFunction& u, double p,
                                             const MonotoneZeta& zeta, const GridFunction& eta,
                                             int j) {
    if (!(p > 1.0 && p <= 2.0))
        throw std::invalid_argument("caccioppoli_ratio_singular: needs 1 < p <= 2");
    zeta.validate();
    const CellFields f = make_cell_fields(u, eta);
    const double w = u.domain.h(0) * u.domain.h(1);

    const GridFunction* duj = j == 0 ? &f.du1 : &f.du2;
    GridFunction zfield = *duj;
    for (double& t : zfield.values) t = Z_of_zeta(zeta, t);

    SumAccumulator lhs_acc, rhs_acc;
    const GridFunction zx = cell_forward_diff(zfield, 0);
    const GridFunction zy = cell_forward_diff(zfield, 1);
    for (std::size_t c = 0; c < zfield.values.size(); ++c) {
        const double eta2 = f.eta.values[c] * f.eta.values[c];
        for (int i = 0; i < 2; ++i) {
            const double dui = (i == 0 ? f.du1 : f.du2).values[c];
            if (std::abs(dui) <= 1e-12) continue; // mirrors the {U_{x_i} != 0} restriction
            const double zi = (i == 0 ? zx : zy).values[c];
            lhs_acc.add(w * pow_abs(dui, p - 2.0) * zi * zi * eta2);
        }
        const double mag = std::hypot(f.du1.values[c], f.du2.values[c]);
        const double eta_terms = f.ex.values[c] * f.ex.values[c] +
                                 f.ey.values[c] * f.ey.values[c] + f.hess_abs.values[c];
        rhs_acc.add(w * pow_abs(mag, p - 1.0) *
                    (mag * std::abs(zeta.zeta_prime(duj->values[c])) +
                     std::abs(zeta.zeta(duj->values[c]))) *
                    eta_terms);
    }
    CaccioppoliResult r;
    r.lhs = lhs_acc.reduce();
    r.rhs = rhs_acc.reduce();
    finish_ratio(r);
    return r;
}

MinPrincipleResult min_principle_check(const GridFunction& u_eps, double p, Regime regime,
                                       const BallSpec& b, int j, double grad_tol, double c_h) {
    // Degenerate regime tracks g_{(p-2)/2}(u_{x_j}); singular tracks u_{x_j}
    // itself, which is what nonlinear_gradient produces for p <= 2.
    if (regime == Regime::Singular && p > 2.0 + 1e-12)
        throw std::invalid_argument("min_principle_check: regime inconsistent with p");
    const NonlinearGradient ng = nonlinear_gradient(u_eps, p);
    const GridFunction& q = ng.component(j);
    const IndexSet circle = circle_nodes(q.domain, b);
    if (circle.empty()) throw EmptyBall();
    MinPrincipleResult r;
    double cmin = q.values[std::size_t(circle[0])];
    for (int i : circle) cmin = std::min(cmin, q.values[std::size_t(i)]);
    r.circle_min = cmin;
    r.ball_min = infimum_on_ball(q, b);
    r.tol = std::max(10.0 * grad_tol, c_h * u_eps.domain.hmax());
    r.ok = r.ball_min >= r.circle_min - r.tol;
    return r;
}

FastConvergenceResult fast_convergence_Yn(double c, double b, double beta, double Y1, int N) {
    if (!(c > 0.0 && b > 0.0 && beta > 0.0))
        throw std::invalid_argument("fast_convergence_Yn: parameters must be positive");
    if (!(Y1 >= 0.0)) throw std::invalid_argument("fast_convergence_Yn: Y1 must be nonnegative");
    FastConvergenceResult r;
    r.threshold = std::pow(c, -1.0 / beta) * std::pow(b, -(beta + 1.0) / (beta * beta));
    r.Y.push_back(Y1);
    double y = Y1;
    for (int n = 1; n < N; ++n) {
        y = c * std::pow(b, double(n - 1)) * std::pow(y, 1.0 + beta);
        if (!(y <= 1e300)) {
            r.diverged = true;
            break;
        }
        r.Y.push_back(y);
    }
    return r;
}

SvAlternativeResult sv_alternative_check(const GridFunction& phi, double M, double gamma,
                                         const BallSpec& b) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("sv_alternative_check: gamma must lie in (0,1)");
    const IndexSet nodes = ball_nodes(phi.domain, b);
    if (nodes.empty()) throw EmptyBall();
    const double slack = 1e-9 * std::max(1.0, std::abs(M));
    int above = 0;
    for (int i : nodes) {
        const double v = phi.values[std::size_t(i)];
        if (v < -slack || v > M + slack)
            throw std::invalid_argument("sv_alternative_check: phi must satisfy 0 <= phi <= M");
        if (v > 0.75 * M) ++above;
    }

    SvAlternativeResult r;
    r.super_fraction = double(above) / double(nodes.size());
    r.delta = std::sqrt(0.5 * gamma);
    if (r.super_fraction < gamma) {
        r.verdict = SvVerdict::HypothesisFails;
        return r;
    }

    r.annulus_energy = dirichlet_on_annulus(phi, b.center, r.delta * b.radius, b.radius);
    r.quantum = gamma * M * M / (512.0 * kPi);
    const bool a1 = r.annulus_energy >= r.quantum * (1.0 - 1e-12);

    bool a2 = false;
    const double h = phi.domain.hmax();
    r.best_circle_min = -std::numeric_limits<double>::infinity();
    for (double s = r.delta * b.radius; s <= b.radius + 1e-15; s += h) {
        const IndexSet band = circle_nodes(phi.domain, BallSpec{b.center, s}, h);
        if (band.empty()) continue;
        double bmin = phi.values[std::size_t(band[0])];
        for (int i : band) bmin = std::min(bmin, phi.values[std::size_t(i)]);
        r.best_circle_min = std::max(r.best_circle_min, bmin);
        if (bmin >= (5.0 / 8.0) * M * (1.0 - 1e-12)) {
            a2 = true;
            break;
        }
    }

    if (a1 && a2)
        r.verdict = SvVerdict::Both;
    else if (a1)
        r.verdict = SvVerdict::A1Only;
    else if (a2)
        r.verdict = SvVerdict::A2Only;
    else
        r.verdict = SvVerdict::Violation;
    return r;
}

double poincare_check(const GridFunction& f, const BallSpec& b) {
    const Domain& d = f.domain;
    const double w = d.h(0) * d.h(1);
    int support = 0;
    SumAccumulator num;
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix) {
            const double v = f.at(ix, iy);
            if (v == 0.0) continue;
            if (dist(d.node(ix, iy), b.center) > b.radius)
                throw std::invalid_argument("poincare_check: f must vanish outside the ball");
            ++support;
            num.add(w * v * v);
        }
    if (support == 0) return 0.0;
    const double grad = dirichlet_quadratic(f);
    if (!(grad > 0.0))
        throw std::logic_error("poincare_check: nonzero f with vanishing gradient");
    return num.reduce() / (double(support) * w * grad);
}

} // namespace oplab

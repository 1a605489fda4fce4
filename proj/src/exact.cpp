#include "oplab/exact.hpp"

#include <complex>

#include "oplab/solver.hpp"

namespace oplab {

double model_eval(const ModelSolution& m, double x1, double x2) {
    switch (m.kind) {
    case ModelKind::Separable: {
        const double q = m.p / (m.p - 1.0);
        return pow_abs(x1, q) - pow_abs(x2, q);
    }
    case ModelKind::Affine:
        return m.a * x1 + m.b * x2;
    case ModelKind::P2Harmonic: {
        std::complex<double> z(x1, x2), zk(1.0, 0.0);
        for (int k = 0; k < m.degree; ++k) zk *= z;
        return zk.real();
    }
    }
    return 0.0;
}

std::array<double, 2> model_gradient(const ModelSolution& m, double x1, double x2) {
    switch (m.kind) {
    case ModelKind::Separable: {
        const double q = m.p / (m.p - 1.0);
        return {q * g_q(q - 2.0, x1), -q * g_q(q - 2.0, x2)};
    }
    case ModelKind::Affine:
        return {m.a, m.b};
    case ModelKind::P2Harmonic: {
        std::complex<double> z(x1, x2), zk(1.0, 0.0);
        for (int k = 0; k + 1 < m.degree; ++k) zk *= z;
        zk *= double(m.degree);
        return {zk.real(), -zk.imag()};
    }
    }
    return {0.0, 0.0};
}

GridFunction sample_model(const ModelSolution& m, const Domain& d) {
    m.validate();
    return GridFunction::sample(d, [&](double x, double y) { return model_eval(m, x, y); });
}

StreamResult stream_function(const GridFunction& u, double p, double curl_tol) {
    const Domain& d = u.domain;
    d.validate(3);
    const double hx = d.h(0), hy = d.h(1);
    const VectorField g = discrete_gradient(u);

    // Rotated flux on the dual edges of the cell-centered grid. The edge
    // between cells (ix,iy) and (ix+1,iy) crosses the node column ix+1, where
    // the axis-2 difference lives; analogously for vertical dual edges.
    const Domain dual = d.cell_centered();
    const int cx = dual.nx(), cy = dual.ny();
    const auto W1 = [&](int ix, int iy) { return g_q(p - 2.0, g.d2(ix + 1, iy)); };
    const auto W2 = [&](int ix, int iy) { return -g_q(p - 2.0, g.d1(ix, iy + 1)); };

    GridFunction v = GridFunction::zeros(dual);
    for (int ix = 0; ix + 1 < cx; ++ix)
        v.at(ix + 1, 0) = v.at(ix, 0) + hx * W1(ix, 0);
    for (int ix = 0; ix < cx; ++ix)
        for (int iy = 0; iy + 1 < cy; ++iy)
            v.at(ix, iy + 1) = v.at(ix, iy) + hy * W2(ix, iy);

    double defect = 0.0;
    for (int iy = 0; iy + 1 < cy; ++iy)
        for (int ix = 0; ix + 1 < cx; ++ix) {
            const double circulation = hx * W1(ix, iy) + hy * W2(ix + 1, iy) -
                                       hx * W1(ix, iy + 1) - hy * W2(ix, iy);
            defect = std::max(defect, std::abs(circulation) / (hx * hy));
        }

    if (defect > curl_tol) throw CurlTooLarge(defect);
    return {std::move(v), defect};
}

double duality_residual(const GridFunction& v, double p, int trial_count,
                        std::uint64_t rng_seed) {
    if (!(p > 1.0)) throw std::invalid_argument("duality_residual: p must exceed 1");
    ProblemSpec dual_spec;
    dual_spec.p = p / (p - 1.0);
    dual_spec.regime = dual_spec.p > 2.0 ? Regime::Degenerate : Regime::Singular;
    dual_spec.eps = 0.0;
    dual_spec.domain = v.domain;
    dual_spec.boundary = GridFunction::zeros(v.domain);
    return weak_residual(dual_spec, v, trial_count, rng_seed);
}

} // namespace oplab

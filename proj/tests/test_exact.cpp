#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oplab/battery.hpp"
#include "oplab/exact.hpp"
#include "oplab/regularity.hpp"
#include "oplab/solver.hpp"

using namespace oplab;

namespace {

Domain square(int n, double lo, double hi) {
    return Domain{{lo, lo}, {hi - lo, hi - lo}, {n, n}};
}

ModelSolution separable(double p) {
    ModelSolution m;
    m.kind = ModelKind::Separable;
    m.p = p;
    return m;
}

} // namespace

TEST_CASE("separable model point values") {
    CHECK(model_eval(separable(3.0), 0.0, 0.0) == 0.0);
    CHECK(model_eval(separable(2.0), 1.0, 1.0) == 0.0);
    // p = 4: 1 - 0.5^{4/3}
    CHECK(model_eval(separable(4.0), 1.0, 0.5) ==
          doctest::Approx(1.0 - std::pow(0.5, 4.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("separable model gradient") {
    const auto g0 = model_gradient(separable(4.0), 0.0, 0.0);
    CHECK(g0[0] == 0.0);
    CHECK(g0[1] == 0.0);
    const auto g2 = model_gradient(separable(2.0), 0.7, -0.3);
    CHECK(g2[0] == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(g2[1] == doctest::Approx(0.6).epsilon(1e-14));
    // p = 4 at (8, 0): (4/3) * 8^{1/3} = 8/3
    const auto g4 = model_gradient(separable(4.0), 8.0, 0.0);
    CHECK(g4[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(g4[1] == 0.0);
}

TEST_CASE("model gradient matches centered differences away from the axes") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        ModelSolution m = separable(rng.uniform(1.2, 5.0));
        if (trial % 3 == 1) {
            m.kind = ModelKind::Affine;
            m.a = rng.uniform(-2, 2);
            m.b = rng.uniform(-2, 2);
        } else if (trial % 3 == 2) {
            m.kind = ModelKind::P2Harmonic;
            m.degree = rng.uniform_int(1, 4);
        }
        double x = rng.uniform(0.2, 2.0) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        double y = rng.uniform(0.2, 2.0) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        const double step = 1e-6;
        const auto grad = model_gradient(m, x, y);
        const double fdx =
            (model_eval(m, x + step, y) - model_eval(m, x - step, y)) / (2.0 * step);
        const double fdy =
            (model_eval(m, x, y + step) - model_eval(m, x, y - step)) / (2.0 * step);
        CHECK(std::abs(grad[0] - fdx) <= 1e-6 * std::max(1.0, std::abs(fdx)));
        CHECK(std::abs(grad[1] - fdy) <= 1e-6 * std::max(1.0, std::abs(fdy)));
    }
}

TEST_CASE("separable growth law: sup of |d1 u| on a strip is (p/(p-1)) r^{1/(p-1)}") {
    const double p = 4.0;
    const ModelSolution m = separable(p);
    const Domain d = square(129, -1.0, 1.0);
    const GridFunction u = sample_model(m, d);
    const NonlinearGradient raw = nonlinear_gradient(u, 2.0);
    for (double r : {0.25, 0.5}) {
        double sup = 0.0;
        const Domain& sd = raw.v1.domain;
        for (int iy = 0; iy < sd.ny(); ++iy)
            for (int ix = 0; ix < sd.nx(); ++ix)
                if (std::abs(sd.coord(0, ix)) <= r)
                    sup = std::max(sup, std::abs(raw.v1.at(ix, iy)));
        const double exact_sup = p / (p - 1.0) * std::pow(r, 1.0 / (p - 1.0));
        // one grid cell of slack
        const double slack =
            p / (p - 1.0) * (std::pow(r, 1.0 / (p - 1.0)) -
                             std::pow(std::max(r - sd.h(0), 0.0), 1.0 / (p - 1.0)));
        CHECK(sup <= exact_sup + 1e-12);
        CHECK(sup >= exact_sup - slack - 1e-12);
    }
}

TEST_CASE("stream function of affine data is the rotated-coefficient affine") {
    const Domain d = square(11, 0.0, 1.0);
    const double p = 3.0, a = 1.2, b = -0.7;
    const GridFunction u =
        GridFunction::sample(d, [&](double x, double y) { return a * x + b * y; });
    const StreamResult sr = stream_function(u, p);
    CHECK(sr.defect <= 1e-13);
    const Domain& dual = sr.v.domain;
    const double ga = g_q(p - 2.0, a), gb = g_q(p - 2.0, b);
    const double c0 = gb * dual.coord(0, 0) - ga * dual.coord(1, 0); // v(first cell) = 0
    for (int iy = 0; iy < dual.ny(); ++iy)
        for (int ix = 0; ix < dual.nx(); ++ix) {
            const double expect = gb * dual.coord(0, ix) - ga * dual.coord(1, iy) - c0;
            CHECK(sr.v.at(ix, iy) == doctest::Approx(expect).epsilon(1e-11));
        }
}

TEST_CASE("stream function of zero is zero") {
    const Domain d = square(9, 0.0, 1.0);
    const StreamResult sr = stream_function(GridFunction::zeros(d), 4.0);
    CHECK(sr.defect == 0.0);
    for (double v : sr.v.values) CHECK(v == 0.0);
}

TEST_CASE("p=2 stream function of x^2 - y^2 is the conjugate harmonic -2xy") {
    const Domain d = square(33, -1.0, 1.0);
    const GridFunction u =
        GridFunction::sample(d, [](double x, double y) { return x * x - y * y; });
    const StreamResult sr = stream_function(u, 2.0);
    CHECK(sr.defect <= 1e-12);
    const Domain& dual = sr.v.domain;
    const double c0 = -2.0 * dual.coord(0, 0) * dual.coord(1, 0);
    for (int iy = 0; iy < dual.ny(); ++iy)
        for (int ix = 0; ix < dual.nx(); ++ix) {
            const double expect = -2.0 * dual.coord(0, ix) * dual.coord(1, iy) - c0;
            CHECK(sr.v.at(ix, iy) == doctest::Approx(expect).epsilon(1e-10));
        }
}

TEST_CASE("CurlTooLarge fires on non-solutions") {
    const Domain d = square(17, -1.0, 1.0);
    Rng rng(3);
    GridFunction junk = GridFunction::zeros(d);
    for (auto& v : junk.values) v = rng.uniform(-1, 1);
    CHECK_THROWS_AS(stream_function(junk, 4.0, 1e-6), CurlTooLarge);
}

TEST_CASE("duality residual of the affine stream function is at rounding level") {
    const Domain d = square(17, 0.0, 1.0);
    const double p = 4.0;
    const GridFunction u =
        GridFunction::sample(d, [&](double x, double y) { return 2.0 * x + y; });
    const StreamResult sr = stream_function(u, p);
    CHECK(duality_residual(sr.v, p, 16, 5) <= 1e-12);
}

TEST_CASE("solved p=4 problem: stream duality chain") {
    const Domain d = square(33, -1.0, 1.0);
    BoundarySpec bs;
    bs.kind = "model_separable";
    const ProblemSpec spec = make_problem(4.0, Regime::Degenerate, d, bs);
    SolverConfig cfg;
    cfg.grad_tol = 1e-7;
    cfg.eps_schedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    const SolveResult res = continuation_solve(spec, cfg);
    REQUIRE(res.report.converged);

    const StreamResult sr = stream_function(res.u, spec.p);
    CHECK(sr.defect < 10.0 * cfg.grad_tol);

    // duality residual of v under p' is far below the residual of noise
    const double dual = duality_residual(sr.v, spec.p, 16, 11);
    Rng rng(17);
    GridFunction noise = sr.v;
    for (auto& v : noise.values) v = rng.uniform(-1, 1);
    const double noise_res = duality_residual(noise, spec.p, 16, 11);
    CHECK(noise_res >= 10.0 * dual);

    // involution: stream applied twice returns -u up to a constant
    const StreamResult sr2 = stream_function(sr.v, spec.p_conjugate());
    const Domain& dd = sr2.v.domain;
    double shift = 0.0;
    for (int iy = 0; iy < dd.ny(); ++iy)
        for (int ix = 0; ix < dd.nx(); ++ix)
            shift += sr2.v.at(ix, iy) + res.u.at(ix + 1, iy + 1);
    shift /= dd.num_nodes();
    double err = 0.0;
    for (int iy = 0; iy < dd.ny(); ++iy)
        for (int ix = 0; ix < dd.nx(); ++ix)
            err = std::max(err, std::abs(sr2.v.at(ix, iy) + res.u.at(ix + 1, iy + 1) - shift));
    const double diam2 = d.extent[0] * d.extent[0] + d.extent[1] * d.extent[1];
    CHECK(err <= (sr.defect + sr2.defect) * diam2 + 1e-9);
}

TEST_CASE("stream involution is near-exact on affine data") {
    const Domain d = square(13, 0.0, 1.0);
    const double p = 3.0;
    const GridFunction u =
        GridFunction::sample(d, [](double x, double y) { return 0.8 * x - 1.1 * y; });
    const StreamResult sr = stream_function(u, p);
    const StreamResult sr2 = stream_function(sr.v, p / (p - 1.0));
    const Domain& dd = sr2.v.domain;
    double shift = 0.0;
    for (int iy = 0; iy < dd.ny(); ++iy)
        for (int ix = 0; ix < dd.nx(); ++ix)
            shift += sr2.v.at(ix, iy) + u.at(ix + 1, iy + 1);
    shift /= dd.num_nodes();
    for (int iy = 0; iy < dd.ny(); ++iy)
        for (int ix = 0; ix < dd.nx(); ++ix)
            CHECK(std::abs(sr2.v.at(ix, iy) + u.at(ix + 1, iy + 1) - shift) < 1e-11);
}

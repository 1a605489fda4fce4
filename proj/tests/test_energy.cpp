#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oplab/energy.hpp"

using namespace oplab;

namespace {

Domain unit_square(int n) { return Domain{{0.0, 0.0}, {1.0, 1.0}, {n, n}}; }

ProblemSpec make_spec(double p, double eps, Regime regime, const Domain& d) {
    ProblemSpec s;
    s.p = p;
    s.eps = eps;
    s.regime = regime;
    s.domain = d;
    s.boundary = GridFunction::zeros(d);
    return s;
}

GridFunction random_field(const Domain& d, Rng& rng, double amp = 1.0) {
    GridFunction u = GridFunction::zeros(d);
    for (auto& v : u.values) v = rng.uniform(-amp, amp);
    return u;
}

GridFunction random_interior_field(const Domain& d, Rng& rng, double amp = 1.0) {
    GridFunction u = GridFunction::zeros(d);
    for (int iy = 1; iy + 1 < d.ny(); ++iy)
        for (int ix = 1; ix + 1 < d.nx(); ++ix)
            u.at(ix, iy) = rng.uniform(-amp, amp);
    return u;
}

// Central finite difference of the energy in the direction of node (ix, iy).
double fd_gradient_entry(const ProblemSpec& spec, const GridFunction& u, int ix, int iy,
                         double step) {
    GridFunction plus = u, minus = u;
    plus.at(ix, iy) += step;
    minus.at(ix, iy) -= step;
    return (energy_regularized(spec, plus).total - energy_regularized(spec, minus).total) /
           (2.0 * step);
}

} // namespace

TEST_CASE("g_q basics") {
    CHECK(g_q(1.0, 2.0) == 4.0);
    CHECK(g_q(0.7, 0.0) == 0.0);
    CHECK(g_q(-0.5, 0.0) == 0.0);
    // inverse composition law g_q^{-1} = g_{-q/(q+1)}
    const double q = 1.0, t = -3.0;
    CHECK(g_q(-q / (q + 1.0), g_q(q, t)) == doctest::Approx(t).epsilon(1e-14));
    // odd and increasing
    CHECK(g_q(1.5, -2.0) == -g_q(1.5, 2.0));
    CHECK(g_q(1.5, 1.0) < g_q(1.5, 2.0));
}

TEST_CASE("orthotropic energy of constants is zero") {
    const Domain d = unit_square(7);
    const ProblemSpec spec = make_spec(3.0, 0.0, Regime::Degenerate, d);
    const GridFunction u = GridFunction::constant(d, 4.2);
    CHECK(energy_orthotropic(spec, u).total == 0.0);
}

TEST_CASE("energy of u = x1 on the unit square is area / p") {
    for (int n : {4, 9, 17}) {
        const Domain d = unit_square(n);
        for (double p : {1.5, 2.0, 3.0, 4.0}) {
            const ProblemSpec spec =
                make_spec(p, 0.0, p >= 2.0 ? Regime::Degenerate : Regime::Singular, d);
            const GridFunction u =
                GridFunction::sample(d, [](double x, double) { return x; });
            const EnergyValue e = energy_orthotropic(spec, u);
            CHECK(e.total == doctest::Approx(1.0 / p).epsilon(1e-13));
            CHECK(e.per_axis[1] == 0.0);
        }
    }
}

TEST_CASE("derived closed form: p=4, u = x1 + 2 x2 gives 4.25") {
    const Domain d = unit_square(11);
    const ProblemSpec spec = make_spec(4.0, 0.0, Regime::Degenerate, d);
    const GridFunction u =
        GridFunction::sample(d, [](double x, double y) { return x + 2.0 * y; });
    CHECK(energy_orthotropic(spec, u).total == doctest::Approx(17.0 / 4.0).epsilon(1e-13));
}

TEST_CASE("EnergyValue parts sum to the total") {
    const Domain d = unit_square(8);
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const double p = rng.uniform(2.0, 5.0);
        const ProblemSpec spec = make_spec(p, rng.uniform(0.0, 0.5), Regime::Degenerate, d);
        const GridFunction u = random_field(d, rng);
        const EnergyValue e = energy_regularized(spec, u);
        CHECK(e.total ==
              doctest::Approx(e.per_axis[0] + e.per_axis[1] + e.eps_part).epsilon(1e-12));
    }
}

TEST_CASE("regularized energy reduces to the orthotropic one at eps = 0") {
    const Domain d = unit_square(9);
    Rng rng(4);
    for (Regime regime : {Regime::Degenerate, Regime::Singular}) {
        const double p = regime == Regime::Degenerate ? 3.5 : 1.5;
        const ProblemSpec spec = make_spec(p, 0.0, regime, d);
        const GridFunction u = random_field(d, rng);
        CHECK(energy_regularized(spec, u).total ==
              doctest::Approx(energy_orthotropic(spec, u).total).epsilon(1e-12));
    }
}

TEST_CASE("singular energy of the zero function is the constant (2/p) |B| eps^{p/2}") {
    const Domain d = unit_square(6);
    const double p = 1.5, eps = 0.3;
    const ProblemSpec spec = make_spec(p, eps, Regime::Singular, d);
    const GridFunction u = GridFunction::zeros(d);
    CHECK(energy_regularized(spec, u).total ==
          doctest::Approx(2.0 / p * std::pow(eps, 0.5 * p)).epsilon(1e-12));
}

TEST_CASE("derived closed form: degenerate p=4, eps=0.5, u=x1 gives 1.0") {
    const Domain d = unit_square(13);
    const ProblemSpec spec = make_spec(4.0, 0.5, Regime::Degenerate, d);
    const GridFunction u = GridFunction::sample(d, [](double x, double) { return x; });
    CHECK(energy_regularized(spec, u).total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("gradient vanishes on affine data away from the boundary") {
    const Domain d = unit_square(9);
    const ProblemSpec spec = make_spec(3.0, 0.0, Regime::Degenerate, d);
    const GridFunction u =
        GridFunction::sample(d, [](double x, double y) { return 2.0 * x - y; });
    const GridFunction g = energy_gradient(spec, u);
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix)
            CHECK(std::abs(g.at(ix, iy)) <= 1e-13);
}

TEST_CASE("p=2, eps=0 gradient is the 5-point Laplacian stencil (scaled by h^2)") {
    const Domain d = unit_square(9);
    const double h = d.h(0);
    const ProblemSpec spec = make_spec(2.0, 0.0, Regime::Degenerate, d);
    Rng rng(8);
    const GridFunction u = random_field(d, rng);
    const GridFunction g = energy_gradient(spec, u);
    for (int iy = 1; iy + 1 < d.ny(); ++iy)
        for (int ix = 1; ix + 1 < d.nx(); ++ix) {
            const double lap5 = u.at(ix + 1, iy) + u.at(ix - 1, iy) + u.at(ix, iy + 1) +
                                u.at(ix, iy - 1) - 4.0 * u.at(ix, iy);
            CHECK(g.at(ix, iy) == doctest::Approx(-lap5).epsilon(1e-11));
            (void)h;
        }
}

TEST_CASE("gradient matches central finite differences of the energy") {
    Rng rng(15);
    const Domain d = unit_square(6);
    for (int trial = 0; trial < 20; ++trial) {
        const bool degenerate = trial % 2 == 0;
        const double p = degenerate ? rng.uniform(2.0, 4.5) : rng.uniform(1.2, 2.0);
        const double eps = rng.uniform(0.01, 0.5);
        const ProblemSpec spec =
            make_spec(p, eps, degenerate ? Regime::Degenerate : Regime::Singular, d);
        const GridFunction u = random_field(d, rng);
        const GridFunction g = energy_gradient(spec, u);
        for (int iy = 1; iy + 1 < d.ny(); ++iy)
            for (int ix = 1; ix + 1 < d.nx(); ++ix) {
                const double fd = fd_gradient_entry(spec, u, ix, iy, 1e-6);
                const double scale = std::max(std::abs(fd), 1e-8);
                CHECK(std::abs(g.at(ix, iy) - fd) / scale < 1e-6);
            }
    }
}

TEST_CASE("hessian_apply on w = 0 gives 0, rejects singular eps = 0") {
    const Domain d = unit_square(6);
    Rng rng(20);
    const GridFunction u = random_field(d, rng);
    const ProblemSpec spec = make_spec(4.0, 0.2, Regime::Degenerate, d);
    const GridFunction z = hessian_apply(spec, u, GridFunction::zeros(d));
    for (double v : z.values) CHECK(v == 0.0);
    const ProblemSpec bad = make_spec(1.5, 0.0, Regime::Singular, d);
    CHECK_THROWS_AS(hessian_apply(bad, u, u), std::invalid_argument);
}

TEST_CASE("p=2 degenerate hessian acts as the Laplacian, independent of u") {
    const Domain d = unit_square(7);
    Rng rng(31);
    const GridFunction u1 = random_field(d, rng), u2 = random_field(d, rng);
    const GridFunction w = random_interior_field(d, rng);
    const ProblemSpec spec = make_spec(2.0, 0.0, Regime::Degenerate, d);
    const GridFunction a = hessian_apply(spec, u1, w);
    const GridFunction b = hessian_apply(spec, u2, w);
    const GridFunction lap = energy_gradient(spec, w);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
        CHECK(a.values[i] == doctest::Approx(lap.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("hessian symmetry and finite-difference consistency on a 5x5 grid") {
    const Domain d = unit_square(5);
    Rng rng(42);
    const ProblemSpec spec = make_spec(4.0, 0.1, Regime::Degenerate, d);
    const GridFunction u = random_field(d, rng);
    const GridFunction w = random_interior_field(d, rng);
    const GridFunction z = random_interior_field(d, rng);

    const GridFunction Hw = hessian_apply(spec, u, w);
    const GridFunction Hz = hessian_apply(spec, u, z);
    double hwz = 0.0, hzw = 0.0;
    for (std::size_t i = 0; i < Hw.values.size(); ++i) {
        hwz += Hw.values[i] * z.values[i];
        hzw += Hz.values[i] * w.values[i];
    }
    CHECK(hwz == doctest::Approx(hzw).epsilon(1e-10));

    // (grad E(u + t w) - grad E(u - t w)) / 2t
    const double t = 1e-5;
    GridFunction up = u, um = u;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        up.values[i] += t * w.values[i];
        um.values[i] -= t * w.values[i];
    }
    const GridFunction gp = energy_gradient(spec, up), gm = energy_gradient(spec, um);
    for (std::size_t i = 0; i < Hw.values.size(); ++i) {
        const double fd = (gp.values[i] - gm.values[i]) / (2.0 * t);
        CHECK(std::abs(Hw.values[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("hessian coercivity: <Hw, w> >= (p-1) eps |grad w|^2 in the degenerate regime") {
    const Domain d = unit_square(8);
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const double p = rng.uniform(2.0, 5.0), eps = rng.uniform(0.01, 1.0);
        const ProblemSpec spec = make_spec(p, eps, Regime::Degenerate, d);
        const GridFunction u = random_field(d, rng);
        const GridFunction w = random_interior_field(d, rng);
        const GridFunction Hw = hessian_apply(spec, u, w);
        double quad = 0.0;
        for (std::size_t i = 0; i < Hw.values.size(); ++i) quad += Hw.values[i] * w.values[i];
        CHECK(quad >= (p - 1.0) * eps * dirichlet_quadratic(w) * (1.0 - 1e-10));
    }
}

TEST_CASE("convexity: secant test in both regimes") {
    const Domain d = unit_square(7);
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const bool degenerate = trial % 2 == 0;
        const double p = degenerate ? rng.uniform(2.0, 5.0) : rng.uniform(1.1, 2.0);
        const double eps = trial % 3 == 0 ? 0.0 : rng.uniform(0.0, 1.0);
        const ProblemSpec spec =
            make_spec(p, eps, degenerate ? Regime::Degenerate : Regime::Singular, d);
        const GridFunction u = random_field(d, rng), w = random_field(d, rng);
        const double t = rng.uniform01();
        GridFunction mix = GridFunction::zeros(d);
        for (std::size_t i = 0; i < mix.values.size(); ++i)
            mix.values[i] = t * u.values[i] + (1.0 - t) * w.values[i];
        const double lhs = energy_regularized(spec, mix).total;
        const double rhs = t * energy_regularized(spec, u).total +
                           (1.0 - t) * energy_regularized(spec, w).total;
        CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("axis-swap symmetry of the orthotropic energy") {
    const Domain d = unit_square(9);
    Rng rng(91);
    const ProblemSpec spec = make_spec(3.2, 0.0, Regime::Degenerate, d);
    const GridFunction u = random_field(d, rng);
    const GridFunction ut = transpose(u);
    ProblemSpec spec_t = spec;
    spec_t.domain = ut.domain;
    spec_t.boundary = GridFunction::zeros(ut.domain);
    CHECK(energy_orthotropic(spec, u).total ==
          doctest::Approx(energy_orthotropic(spec_t, ut).total).epsilon(1e-12));
}

TEST_CASE("scaling law: E(lambda u) = lambda^p E(u)") {
    const Domain d = unit_square(8);
    Rng rng(101);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const ProblemSpec spec =
            make_spec(p, 0.0, p >= 2.0 ? Regime::Degenerate : Regime::Singular, d);
        const GridFunction u = random_field(d, rng);
        const double lambda = rng.uniform(0.2, 3.0);
        GridFunction lu = u;
        for (auto& v : lu.values) v *= lambda;
        CHECK(energy_orthotropic(spec, lu).total ==
              doctest::Approx(std::pow(lambda, p) * energy_orthotropic(spec, u).total)
                  .epsilon(1e-10));
    }
}

TEST_CASE("both regimes give the identical gradient at p = 2, eps = 0") {
    const Domain d = unit_square(8);
    Rng rng(111);
    const GridFunction u = random_field(d, rng);
    const ProblemSpec sd = make_spec(2.0, 0.0, Regime::Degenerate, d);
    const ProblemSpec ss = make_spec(2.0, 0.0, Regime::Singular, d);
    const GridFunction gd = energy_gradient(sd, u), gs = energy_gradient(ss, u);
    for (std::size_t i = 0; i < gd.values.size(); ++i)
        CHECK(gd.values[i] == doctest::Approx(gs.values[i]).epsilon(1e-13));
}

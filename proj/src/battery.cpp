#include "oplab/battery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oplab {

GridFunction BoundarySpec::sample(const Domain& d, double p) const {
    ModelSolution m;
    if (kind == "model_separable") {
        m.kind = ModelKind::Separable;
        m.p = p;
    } else if (kind == "affine") {
        m.kind = ModelKind::Affine;
        m.p = p;
        m.a = a;
        m.b = b;
    } else if (kind == "constant") {
        return GridFunction::constant(d, value);
    } else if (kind == "p2_harmonic") {
        m.kind = ModelKind::P2Harmonic;
        m.p = p;
        m.degree = degree;
    } else {
        throw std::invalid_argument("unknown boundary kind: " + kind);
    }
    return sample_model(m, d);
}

ProblemSpec make_problem(double p, Regime regime, const Domain& d, const BoundarySpec& bspec) {
    ProblemSpec spec;
    spec.p = p;
    spec.regime = regime;
    spec.domain = d;
    spec.boundary = bspec.sample(d, p);
    spec.eps = 0.0;
    return spec;
}

SolvedProblem solve_problem(const std::string& name, const ProblemSpec& spec,
                            const SolverConfig& cfg) {
    SolvedProblem sp;
    sp.name = name;
    sp.spec = spec;
    sp.cfg = cfg;
    sp.result = continuation_solve(spec, cfg);
    sp.spec.eps = cfg.eps_schedule.back();
    if (!sp.result.report.converged)
        throw std::runtime_error("solve_problem: " + name + " did not converge");
    return sp;
}

std::string battery_rows_to_csv(const std::vector<BatteryRow>& rows) {
    std::ostringstream os;
    os << "battery,problem,instance,outcome,a,b,c,d,note\n";
    for (const BatteryRow& r : rows)
        os << r.battery << ',' << r.problem << ',' << r.instance << ',' << r.outcome << ','
           << format_g17(r.a) << ',' << format_g17(r.b) << ',' << format_g17(r.c) << ','
           << format_g17(r.d) << ',' << r.note << '\n';
    return os.str();
}

BallSpec random_interior_ball(const Domain& d, Rng& rng) {
    const double span = std::min(d.extent[0], d.extent[1]);
    const double radius = rng.uniform(0.08, 0.16) * span;
    const double margin = 2.0 * radius + 2.0 * d.hmax();
    BallSpec b;
    b.center = {rng.uniform(d.origin[0] + margin, d.origin[0] + d.extent[0] - margin),
                rng.uniform(d.origin[1] + margin, d.origin[1] + d.extent[1] - margin)};
    b.radius = radius;
    return b;
}

std::vector<BatteryRow> alternatives_battery(const SolvedProblem& sp, int n_balls, double alpha,
                                             double C0, std::uint64_t seed, int n_threads) {
    const GridFunction& u = sp.result.u;
    const NonlinearGradient ng = nonlinear_gradient(u, sp.spec.p);

    Rng rng(seed);
    std::vector<std::pair<BallSpec, int>> cases;
    for (int i = 0; i < n_balls; ++i) {
        const BallSpec b = random_interior_ball(sp.spec.domain, rng);
        cases.emplace_back(b, i % 2); // alternate the tracked component
    }

    std::vector<BatteryRow> rows(static_cast<std::size_t>(n_balls));
    parallel_for(n_balls, n_threads, [&](int i) {
        const auto& [ball, j] = cases[std::size_t(i)];
        const double L = lipschitz_scale(u, ball);
        const double M = oscillation(ng.component(j), ball);
        const DeGiorgiParams par = derive_degiorgi(alpha, C0, sp.spec.p, sp.spec.regime, L, M);
        const AlternativeReport rep =
            alternatives_diagnose(ng.component(j), ball, par, sp.spec.p, sp.spec.regime);
        BatteryRow row;
        row.battery = "alternatives";
        row.problem = sp.name;
        row.instance = i;
        row.outcome = rep.at_least_one() ? "ok" : "violation";
        row.a = rep.M;
        row.b = rep.delta;
        row.c = rep.annulus_energy;
        row.d = rep.quantum;
        row.note = std::string(rep.b1 ? "B1" : "") + (rep.b2 ? "B2" : "");
        rows[std::size_t(i)] = row;
    });
    return rows;
}

std::vector<BatteryRow> degiorgi_battery(const SolvedProblem& sp, int n_balls, double alpha,
                                         double C0, std::uint64_t seed, int n_threads) {
    const GridFunction& u = sp.result.u;
    const NonlinearGradient ng = nonlinear_gradient(u, sp.spec.p);

    Rng rng(seed);
    std::vector<std::pair<BallSpec, int>> cases;
    for (int i = 0; i < n_balls; ++i)
        cases.emplace_back(random_interior_ball(sp.spec.domain, rng), i % 2);

    std::vector<BatteryRow> rows(static_cast<std::size_t>(n_balls));
    parallel_for(n_balls, n_threads, [&](int i) {
        const auto& [ball, j] = cases[std::size_t(i)];
        const double L = lipschitz_scale(u, ball);
        const double M = oscillation(ng.component(j), ball);
        const DeGiorgiParams par = derive_degiorgi(alpha, C0, sp.spec.p, sp.spec.regime, L, M);
        const LevelCheckResult res =
            degiorgi_level_check(ng.component(j), ball, par, sp.spec.p, sp.spec.regime);
        BatteryRow row;
        row.battery = "degiorgi";
        row.problem = sp.name;
        row.instance = i;
        switch (res.verdict) {
        case LevelVerdict::TrivialHolds: row.outcome = "trivial"; break;
        case LevelVerdict::HypothesisFails: row.outcome = "hypothesis-fails"; break;
        case LevelVerdict::HoldsAndConcludes: row.outcome = "ok"; break;
        case LevelVerdict::Violation: row.outcome = "violation"; break;
        }
        row.a = res.M;
        row.b = res.fraction;
        row.c = res.threshold;
        row.d = res.half_osc;
        rows[std::size_t(i)] = row;
    });
    return rows;
}

std::vector<BatteryRow> min_principle_battery(const SolvedProblem& sp, int n_balls, double c_h,
                                              std::uint64_t seed, int n_threads) {
    Rng rng(seed);
    std::vector<std::pair<BallSpec, int>> cases;
    for (int i = 0; i < n_balls; ++i)
        cases.emplace_back(random_interior_ball(sp.spec.domain, rng), i % 2);

    std::vector<BatteryRow> rows(static_cast<std::size_t>(n_balls));
    parallel_for(n_balls, n_threads, [&](int i) {
        const auto& [ball, j] = cases[std::size_t(i)];
        const MinPrincipleResult res = min_principle_check(
            sp.result.u, sp.spec.p, sp.spec.regime, ball, j, sp.cfg.grad_tol, c_h);
        BatteryRow row;
        row.battery = "min_principle";
        row.problem = sp.name;
        row.instance = i;
        row.outcome = res.ok ? "ok" : "violation";
        row.a = res.circle_min;
        row.b = res.ball_min;
        row.c = res.tol;
        rows[std::size_t(i)] = row;
    });
    return rows;
}

std::vector<BatteryRow> min_principle_negative_control(const Domain& d) {
    // u = x1 minus a localized antiderivative bump: u_{x1} dips well below its
    // circle values strictly inside the ball, so the check must fail.
    const double cx = d.origin[0] + 0.5 * d.extent[0];
    const double cy = d.origin[1] + 0.5 * d.extent[1];
    const double s = 0.1 * std::min(d.extent[0], d.extent[1]);
    GridFunction u = GridFunction::sample(d, [&](double x, double y) {
        const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * s * s);
        return x - s * std::exp(-r2);
    });
    const BallSpec ball{{cx, cy}, 0.35 * std::min(d.extent[0], d.extent[1])};
    const MinPrincipleResult res =
        min_principle_check(u, 4.0, Regime::Degenerate, ball, 0, 1e-7, 2.0);
    BatteryRow row;
    row.battery = "min_principle_negative_control";
    row.problem = "interior-dip";
    row.instance = 0;
    row.outcome = res.ok ? "unexpected-pass" : "violation";
    row.a = res.circle_min;
    row.b = res.ball_min;
    row.c = res.tol;
    row.note = "designed control; violation expected";
    return {row};
}

std::vector<BatteryRow> apriori_battery(const SolvedProblem& sp, int n_balls,
                                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<BatteryRow> rows;
    for (int i = 0; i < n_balls; ++i) {
        BallSpec ball = random_interior_ball(sp.spec.domain, rng);
        const ApLipschitzResult lip = apriori_lipschitz_check(sp.result.u, sp.spec.p, ball);
        BatteryRow row;
        row.battery = "apriori_lipschitz";
        row.problem = sp.name;
        row.instance = i;
        row.outcome = std::isfinite(lip.ratio) ? "ok" : "violation";
        row.a = lip.ratio;
        row.b = lip.mean_p;
        rows.push_back(row);

        const double alpha = std::max(0.5 * sp.spec.p, 1.0);
        const ApSobolevResult sob = apriori_sobolev_check(sp.result.u, sp.spec.p, alpha, ball);
        BatteryRow row2;
        row2.battery = "apriori_sobolev";
        row2.problem = sp.name;
        row2.instance = i;
        row2.outcome = std::isfinite(sob.ratio) ? "ok" : "violation";
        row2.a = sob.ratio;
        row2.b = sob.numerator;
        row2.c = sob.denominator;
        rows.push_back(row2);
    }
    return rows;
}

std::vector<BatteryRow> caccioppoli_battery(const SolvedProblem& sp, std::uint64_t seed) {
    (void)seed;
    const Domain& d = sp.spec.domain;
    const double cx = d.origin[0] + 0.5 * d.extent[0];
    const double cy = d.origin[1] + 0.5 * d.extent[1];
    const double R = 0.35 * std::min(d.extent[0], d.extent[1]);
    const GridFunction eta = make_radial_cutoff(d, BallSpec{{cx, cy}, R}, 0.5 * R);

    std::vector<BatteryRow> rows;
    int inst = 0;
    const auto push = [&](const char* battery, const CaccioppoliResult& res,
                          const std::string& note) {
        BatteryRow row;
        row.battery = battery;
        row.problem = sp.name;
        row.instance = inst++;
        row.outcome = std::isfinite(res.ratio) ? "ok" : "violation";
        row.a = res.lhs;
        row.b = res.rhs;
        row.c = res.ratio;
        row.note = note;
        rows.push_back(row);
    };

    if (sp.spec.regime == Regime::Degenerate && sp.spec.p > 2.0) {
        const NonlinearGradient raw = nonlinear_gradient(sp.result.u, 2.0);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                // beta at the median of u_{x_j} over the grid
                std::vector<double> vals = raw.component(j).values;
                std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
                const double beta = vals[vals.size() / 2];
                push("caccioppoli_degenerate",
                     caccioppoli_ratio_degenerate(
                         sp.result.u, sp.spec.p, PhiSpec{PhiSpec::Kind::Identity, 1.0},
                         ZetaSpec{ZetaSpec::Kind::ShiftedSquarePlus, beta}, eta, j, k),
                     "phi=id;zeta=(t-med)+^2;j=" + std::to_string(j) + ";k=" + std::to_string(k));
            }
        push("caccioppoli_degenerate",
             caccioppoli_ratio_degenerate(sp.result.u, sp.spec.p,
                                          PhiSpec{PhiSpec::Kind::Identity, 1.0},
                                          ZetaSpec{ZetaSpec::Kind::Constant, 1.0}, eta, 0, 1),
             "phi=id;zeta=1");
        push("caccioppoli_degenerate",
             caccioppoli_ratio_degenerate(sp.result.u, sp.spec.p,
                                          PhiSpec{PhiSpec::Kind::OddPower, 1.0},
                                          ZetaSpec{ZetaSpec::Kind::Square, 0.0}, eta, 1, 0),
             "phi=g1;zeta=t^2");
    } else {
        for (int j = 0; j < 2; ++j) {
            push("caccioppoli_singular",
                 caccioppoli_ratio_singular(sp.result.u, sp.spec.p,
                                            MonotoneZeta{MonotoneZeta::Kind::Identity, 0.0, 1.0},
                                            eta, j),
                 "zeta=t;j=" + std::to_string(j));
            push("caccioppoli_singular",
                 caccioppoli_ratio_singular(
                     sp.result.u, sp.spec.p,
                     MonotoneZeta{MonotoneZeta::Kind::XiDelta, 0.0, 0.1}, eta, j),
                 "zeta=xi_0.1;j=" + std::to_string(j));
        }
    }
    return rows;
}

std::vector<BatteryRow> poincare_battery(const Domain& d, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<BatteryRow> rows;
    for (int i = 0; i < count; ++i) {
        const BallSpec ball = random_interior_ball(d, rng);
        // Tent profile with random height, compactly supported in the ball.
        const double height = rng.uniform(0.5, 2.0);
        GridFunction f = GridFunction::sample(d, [&](double x, double y) {
            const double r = std::hypot(x - ball.center[0], y - ball.center[1]);
            return r < ball.radius ? height * (1.0 - r / ball.radius) : 0.0;
        });
        const double ratio = poincare_check(f, ball);
        BatteryRow row;
        row.battery = "poincare";
        row.problem = "tent";
        row.instance = i;
        row.outcome = std::isfinite(ratio) ? "ok" : "violation";
        row.a = ratio;
        row.b = ball.radius;
        rows.push_back(row);
    }
    return rows;
}

std::vector<BatteryRow> sv_battery(const Domain& d, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<BatteryRow> rows;
    for (int i = 0; i < count; ++i) {
        const BallSpec ball = random_interior_ball(d, rng);
        const double M = rng.uniform(0.5, 2.0);
        const double gamma = rng.uniform(0.05, 0.5);
        // Smoothed plateau fields of varying width; clamped into [0, M].
        const double plateau = rng.uniform(0.3, 0.95) * ball.radius;
        const double edge = rng.uniform(0.2, 1.0) * (ball.radius - plateau) + plateau;
        GridFunction phi = GridFunction::sample(d, [&](double x, double y) {
            const double r = std::hypot(x - ball.center[0], y - ball.center[1]);
            if (r <= plateau) return M;
            if (r >= edge) return 0.0;
            const double t = (edge - r) / (edge - plateau);
            return M * t * t * (3.0 - 2.0 * t);
        });
        const SvAlternativeResult res = sv_alternative_check(phi, M, gamma, ball);
        BatteryRow row;
        row.battery = "sv_alternative";
        row.problem = "plateau";
        row.instance = i;
        row.outcome = res.verdict == SvVerdict::Violation ? "violation"
                      : res.verdict == SvVerdict::HypothesisFails ? "hypothesis-fails"
                                                                  : "ok";
        row.a = res.super_fraction;
        row.b = gamma;
        row.c = res.annulus_energy;
        row.d = res.quantum;
        rows.push_back(row);
    }
    return rows;
}

std::vector<BatteryRow> decay_trace_battery(const SolvedProblem& sp, double alpha, double C0) {
    const Domain& d = sp.spec.domain;
    const double cx = d.origin[0] + 0.5 * d.extent[0];
    const double cy = d.origin[1] + 0.5 * d.extent[1];
    std::vector<BatteryRow> rows;
    int inst = 0;
    for (int j = 0; j < 2; ++j) {
        const OscillationTrace tr = decay_trace(sp.result.u, sp.spec.p, sp.spec.regime,
                                                {cx, cy}, 0.3 * std::min(d.extent[0], d.extent[1]),
                                                alpha, C0, j, 32);
        bool monotone = true;
        for (std::size_t n = 1; n < tr.stages.size(); ++n)
            if (tr.stages[n].M > tr.stages[n - 1].M) monotone = false;
        const bool book_ok = tr.b2_energy_sum <= tr.initial_dirichlet;
        BatteryRow row;
        row.battery = "decay_trace";
        row.problem = sp.name;
        row.instance = inst++;
        row.outcome =
            (!tr.dichotomy_violation && monotone && book_ok) ? "ok" : "violation";
        row.a = double(tr.stages.size());
        row.b = tr.b2_energy_sum;
        row.c = tr.initial_dirichlet;
        row.note = tr.stop_reason;
        rows.push_back(row);
    }
    return rows;
}

namespace {

void probe(InequalityRow& row, double lhs, double rhs, const std::string& argdesc) {
    ++row.samples;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e308 : 0.0);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300) ++row.violations;
    if (ratio > row.worst_ratio) {
        row.worst_ratio = ratio;
        row.argmax = argdesc;
    }
}

std::string arg2(double x, double y) {
    return format_g17(x) + ";" + format_g17(y);
}

} // namespace

std::vector<InequalityRow> inequality_battery(long samples_per_case, std::uint64_t seed) {
    std::vector<InequalityRow> rows;
    const std::vector<double> q_grid{1.1, 1.25, 1.5, 1.75, 2.0};
    const std::vector<double> p_grid{2.5, 3.0, 4.0, 5.0};

    for (double q : q_grid) {
        InequalityRow row;
        row.id = "dibene_q=" + format_g17(q);
        Rng rng(seed ^ fnv1a64(row.id));
        for (long s = 0; s < samples_per_case; ++s) {
            const std::array<double, 2> z0{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
            const std::array<double, 2> z1{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
            const InequalityCheck c = check_dibene(q, z0, z1);
            probe(row, c.lhs, c.rhs, arg2(z0[0], z0[1]) + ";" + arg2(z1[0], z1[1]));
        }
        rows.push_back(row);
    }

    for (double p : q_grid) {
        if (p <= 1.0) continue;
        InequalityRow row;
        row.id = "cor_dibene_p=" + format_g17(p);
        Rng rng(seed ^ fnv1a64(row.id));
        for (long s = 0; s < samples_per_case; ++s) {
            const double eps = rng.uniform01() < 0.2 ? 0.0 : rng.uniform(0.0, 2.0);
            const double t = rng.uniform(-3.0, 3.0), u = rng.uniform(-3.0, 3.0);
            const InequalityCheck c = check_cor_dibene(p, eps, t, u);
            probe(row, c.lhs, c.rhs, arg2(t, u) + ";eps=" + format_g17(eps));
        }
        rows.push_back(row);
    }

    for (double p : p_grid) {
        InequalityRow row;
        row.id = "F_bounds_p=" + format_g17(p);
        Rng rng(seed ^ fnv1a64(row.id));
        for (long s = 0; s < samples_per_case; ++s) {
            const FBetaSpec spec{p, rng.uniform(-2.0, 2.0)};
            const double t = rng.uniform(-2.0, 8.0);
            const FBoundsResult r = check_F_bounds(spec, t);
            ++row.samples;
            if (!r.lower_ok || !r.upper_ok) ++row.violations;
            if (r.slack > row.worst_ratio) {
                row.worst_ratio = r.slack;
                row.argmax = arg2(spec.beta, t);
            }
        }
        rows.push_back(row);
    }

    for (double p : p_grid) {
        InequalityRow row;
        row.id = "power_gap_p=" + format_g17(p);
        Rng rng(seed ^ fnv1a64(row.id));
        for (long s = 0; s < samples_per_case; ++s) {
            const double t = rng.uniform(-3.0, 3.0), u = rng.uniform(-3.0, 3.0);
            const InequalityCheck c = check_power_gap(p, t, u);
            probe(row, c.lhs, c.rhs, arg2(t, u));
        }
        rows.push_back(row);
    }

    for (double p : p_grid) {
        InequalityRow row;
        row.id = "power_lipschitz_p=" + format_g17(p);
        Rng rng(seed ^ fnv1a64(row.id));
        for (long s = 0; s < samples_per_case; ++s) {
            const double t = rng.uniform(-3.0, 3.0), u = rng.uniform(-3.0, 3.0);
            const InequalityCheck c = check_power_lipschitz(p, t, u);
            probe(row, c.lhs, c.rhs, arg2(t, u));
        }
        rows.push_back(row);
    }

    {
        InequalityRow row;
        row.id = "g_composition";
        Rng rng(seed ^ fnv1a64(row.id));
        for (long s = 0; s < samples_per_case; ++s) {
            const double qa = rng.uniform(-0.5, 2.0), qb = rng.uniform(-0.5, 2.0);
            const double t = rng.uniform(-4.0, 4.0);
            const double lhs = g_q(qa, g_q(qb, t));
            const double rhs = g_q(qa + qb + qa * qb, t);
            ++row.samples;
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
            const double rel = std::abs(lhs - rhs) / scale;
            if (rel > 1e-10) ++row.violations;
            if (rel > row.worst_ratio) {
                row.worst_ratio = rel;
                row.argmax = arg2(qa, qb) + ";t=" + format_g17(t);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string inequality_rows_to_csv(const std::vector<InequalityRow>& rows) {
    std::ostringstream os;
    os << "id,samples,violations,worst_ratio,argmax\n";
    for (const InequalityRow& r : rows)
        os << r.id << ',' << r.samples << ',' << r.violations << ',' << format_g17(r.worst_ratio)
           << ',' << r.argmax << '\n';
    return os.str();
}

double calibrate_c0(const std::vector<SolvedProblem>& problems, double alpha, int n_balls,
                    std::uint64_t seed) {
    for (double c0 = 1.0; c0 <= 1024.0; c0 *= 2.0) {
        bool violation = false;
        for (const SolvedProblem& sp : problems) {
            for (const BatteryRow& row : degiorgi_battery(sp, n_balls, alpha, c0, seed))
                if (row.outcome == "violation") violation = true;
            for (const BatteryRow& row : alternatives_battery(sp, n_balls, alpha, c0, seed))
                if (row.outcome == "violation") violation = true;
        }
        if (!violation) return c0;
    }
    return 1024.0;
}

} // namespace oplab

#include "oplab/inequalities.hpp"

#include <cmath>

namespace oplab {

namespace {

// Antiderivatives of |s|^m s and |s|^m, both vanishing at 0 (m > -1).
double int_abs_s(double m, double s) { return pow_abs(s, m + 2.0) / (m + 2.0); }
double int_abs(double m, double s) {
    return (s < 0 ? -1.0 : 1.0) * pow_abs(s, m + 1.0) / (m + 1.0);
}

} // namespace

double F_beta(const FBetaSpec& spec, double t) {
    spec.validate();
    if (t <= spec.beta) return 0.0;
    const double m = 0.5 * (spec.p - 2.0);
    const double beta = spec.beta;
    const double part = (int_abs_s(m, t) - int_abs_s(m, beta)) -
                        beta * (int_abs(m, t) - int_abs(m, beta));
    return 0.5 * spec.p * part;
}

double F_lower_constant(double p, double beta) {
    // The Hoelder-step candidate is proved for beta >= 0 only. For beta < 0
    // the bound carries no explicit constant; 2^{p/2+1} is a recorded sweep
    // envelope (valid for p <= 8, measured sup ~ 5.12 at p = 4 against 8).
    if (beta >= 0.0) return std::pow(2.0, 0.5 * p) * (2.0 / p);
    return std::pow(2.0, 0.5 * p + 1.0);
}
double F_upper_constant(double p) { return p * p / 8.0 + 0.5; }

FBoundsResult check_F_bounds(const FBetaSpec& spec, double t) {
    const double f = F_beta(spec, t);
    const double gap = std::max(t - spec.beta, 0.0);
    const double lower = pow_abs(gap, 0.5 * (spec.p + 2.0)) / F_lower_constant(spec.p, spec.beta);
    const double upper = F_upper_constant(spec.p) *
                         (pow_abs(t, 0.5 * (spec.p - 2.0)) +
                          pow_abs(std::max(0.0, -spec.beta), 0.5 * (spec.p - 2.0))) *
                         gap * gap;
    const double tol = 1.0 + 1e-12;
    FBoundsResult r;
    r.lower_ok = lower <= f * tol + 1e-300;
    r.upper_ok = f <= upper * tol + 1e-300;
    double slack = 0.0;
    if (f > 0.0) slack = std::max(slack, lower / f);
    if (upper > 0.0) slack = std::max(slack, f / upper);
    r.slack = slack;
    return r;
}

namespace {

double vec_norm(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

} // namespace

InequalityCheck check_dibene(double q, std::span<const double> z0, std::span<const double> z1) {
    if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("check_dibene: need 1 < q <= 2");
    if (z0.size() != z1.size() || z0.empty())
        throw std::invalid_argument("check_dibene: dimension mismatch");
    const double n0 = vec_norm(z0), n1 = vec_norm(z1);
    const double w0 = pow_abs(n0, q - 2.0), w1 = pow_abs(n1, q - 2.0);
    double diff2 = 0.0, gap2 = 0.0;
    for (std::size_t i = 0; i < z0.size(); ++i) {
        const double a = (n0 < 1e-300 ? 0.0 : w0 * z0[i]) - (n1 < 1e-300 ? 0.0 : w1 * z1[i]);
        diff2 += a * a;
        const double g = z0[i] - z1[i];
        gap2 += g * g;
    }
    InequalityCheck c;
    c.lhs = std::sqrt(diff2);
    c.rhs = std::pow(2.0, 2.0 - q) * pow_abs(std::sqrt(gap2), q - 1.0);
    c.ok = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
    return c;
}

InequalityCheck check_cor_dibene(double p, double eps, double t, double s) {
    if (!(p > 1.0 && p <= 2.0))
        throw std::invalid_argument("check_cor_dibene: need 1 < p <= 2");
    if (!(eps >= 0.0)) throw std::invalid_argument("check_cor_dibene: eps must be >= 0");
    const double e = 0.25 * (p - 2.0);
    InequalityCheck c;
    c.lhs = std::abs(std::pow(eps + t * t, e) * t - std::pow(eps + s * s, e) * s);
    c.rhs = std::pow(2.0, 0.5 * (2.0 - p)) * pow_abs(t - s, 0.5 * p);
    c.ok = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
    return c;
}

InequalityCheck check_power_gap(double p, double t, double s) {
    if (!(p > 2.0)) throw std::invalid_argument("check_power_gap: need p > 2");
    const double m = 0.5 * (p - 2.0);
    const double d = g_q(m, t) - g_q(m, s);
    InequalityCheck c;
    c.lhs = pow_abs(t - s, p);
    c.rhs = std::pow(2.0, p - 2.0) * d * d;
    c.ok = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
    return c;
}

InequalityCheck check_power_lipschitz(double p, double t, double s) {
    if (!(p > 2.0)) throw std::invalid_argument("check_power_lipschitz: need p > 2");
    const double m = 0.5 * (p - 2.0);
    InequalityCheck c;
    c.lhs = std::abs(g_q(m, t) - g_q(m, s));
    c.rhs = 0.5 * p * (pow_abs(t, m) + pow_abs(s, m)) * std::abs(t - s);
    c.ok = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
    return c;
}

double MonotoneZeta::zeta(double t) const {
    switch (kind) {
    case Kind::Identity: return t;
    case Kind::SquarePlus: {
        const double g = std::max(t - beta, 0.0);
        return g * g;
    }
    case Kind::XiDelta: return xi_delta(delta, t)[0];
    }
    return 0.0;
}

double MonotoneZeta::zeta_prime(double t) const {
    switch (kind) {
    case Kind::Identity: return 1.0;
    case Kind::SquarePlus: return 2.0 * std::max(t - beta, 0.0);
    case Kind::XiDelta: return xi_delta(delta, t)[1];
    }
    return 0.0;
}

double Z_of_zeta(const MonotoneZeta& z, double t) {
    z.validate();
    switch (z.kind) {
    case MonotoneZeta::Kind::Identity:
        return t;
    case MonotoneZeta::Kind::SquarePlus: {
        // antiderivative of sqrt(2 (s - beta)_+) is (2 sqrt2 / 3)(s - beta)_+^{3/2}
        const double c = 2.0 * std::sqrt(2.0) / 3.0;
        const auto a = [&](double s) { return c * std::pow(std::max(s - z.beta, 0.0), 1.5); };
        return a(t) - a(0.0);
    }
    case MonotoneZeta::Kind::XiDelta: {
        const double r3 = std::sqrt(3.0);
        const double a = [&](double s) {
            if (s <= 0.0) return 0.0;
            if (s < z.delta) return 0.5 * r3 * s * s / z.delta;
            return 0.5 * r3 * z.delta + r3 * (s - z.delta);
        }(t);
        const double a0 = 0.0;
        return a - a0;
    }
    }
    throw CatalogueMiss("Z_of_zeta: unknown catalogue entry");
}

std::array<double, 2> xi_delta(double delta, double t) {
    if (!(delta > 0.0)) throw std::invalid_argument("xi_delta: delta must be positive");
    if (t <= 0.0) return {0.0, 0.0};
    if (t < delta) return {t * t * t / (delta * delta), 3.0 * t * t / (delta * delta)};
    return {3.0 * t - 2.0 * delta, 3.0};
}

} // namespace oplab

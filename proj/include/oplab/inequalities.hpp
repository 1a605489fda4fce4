#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>

#include "oplab/util.hpp"

namespace oplab {

struct CatalogueMiss : std::invalid_argument {
    explicit CatalogueMiss(const std::string& what) : std::invalid_argument(what) {}
};

/// F(t) = (p/2) * integral_beta^t |s|^{(p-2)/2} (s - beta)_+ ds, p > 2.
struct FBetaSpec {
    double p;
    double beta;

    void validate() const {
        if (!(p > 2.0)) throw std::invalid_argument("FBetaSpec: p must exceed 2");
    }
};

/// Closed-form piecewise antiderivative evaluation. Zero for t <= beta,
/// nondecreasing on [beta, inf).
double F_beta(const FBetaSpec& spec, double t);

struct FBoundsResult {
    bool lower_ok;
    bool upper_ok;
    double slack; // max of lower/F and F/upper; <= 1 when both bounds hold
};

/// Double-sided bound
///   (t-beta)_+^{(p+2)/2} / C_low <= F(t) <= C_up (|t|^{(p-2)/2} +
///   max(0,-beta)^{(p-2)/2}) (t-beta)_+^2
/// with C_up = p^2/8 + 1/2 and C_low = 2^{p/2} (2/p) for beta >= 0 (the
/// Hoelder-step candidate); for beta < 0 the constant is not explicit and the
/// recorded sweep envelope 2^{p/2+1} is used instead (p <= 8).
FBoundsResult check_F_bounds(const FBetaSpec& spec, double t);
double F_lower_constant(double p, double beta);
double F_upper_constant(double p);

struct InequalityCheck {
    double lhs;
    double rhs;
    bool ok;
};

/// | |z0|^{q-2} z0 - |z1|^{q-2} z1 | <= 2^{2-q} |z0 - z1|^{q-1}, 1 < q <= 2.
InequalityCheck check_dibene(double q, std::span<const double> z0, std::span<const double> z1);

/// |(e+t^2)^{(p-2)/4} t - (e+s^2)^{(p-2)/4} s| <= 2^{(2-p)/2} |t-s|^{p/2},
/// 1 < p <= 2, e >= 0.
InequalityCheck check_cor_dibene(double p, double eps, double t, double s);

/// |t-s|^p <= 2^{p-2} |g_{(p-2)/2}(t) - g_{(p-2)/2}(s)|^2 for p > 2
/// (sharp at antipodal points).
InequalityCheck check_power_gap(double p, double t, double s);

/// |g_{(p-2)/2}(t) - g_{(p-2)/2}(s)| <= (p/2) (|t|^{(p-2)/2} + |s|^{(p-2)/2})
/// |t - s| for p > 2 (mean-value bound; the companion of check_power_gap).
InequalityCheck check_power_lipschitz(double p, double t, double s);

/// Monotone C1 catalogue with closed-form sqrt|zeta'| antiderivatives.
struct MonotoneZeta {
    enum class Kind { Identity, SquarePlus, XiDelta };
    Kind kind = Kind::Identity;
    double beta = 0.0;  // SquarePlus: zeta(t) = (t - beta)_+^2
    double delta = 1.0; // XiDelta family parameter

    void validate() const {
        if (kind == Kind::XiDelta && !(delta > 0.0))
            throw CatalogueMiss("MonotoneZeta: XiDelta needs delta > 0");
    }

    double zeta(double t) const;
    double zeta_prime(double t) const;
};

/// Z(t) = integral_0^t sqrt(|zeta'(s)|) ds, in closed form per catalogue entry.
double Z_of_zeta(const MonotoneZeta& z, double t);

/// C1 ramp: 0 for t <= 0, t^3/delta^2 for 0 < t < delta, 3t - 2 delta beyond.
/// Returns (value, derivative); the derivative is bounded by 3 and equals 3
/// for t >= delta.
std::array<double, 2> xi_delta(double delta, double t);

} // namespace oplab

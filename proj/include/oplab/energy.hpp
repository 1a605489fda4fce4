#pragma once

#include "oplab/grid.hpp"

namespace oplab {

/// p > 2 uses the quadratic penalty form; 1 < p <= 2 the shifted-root form.
/// p = 2 is legal under either, the two gradients coincide at eps = 0.
enum class Regime { Degenerate, Singular };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& s);

struct ProblemSpec {
    double p = 2.0;
    double eps = 0.0;
    Regime regime = Regime::Degenerate;
    Domain domain;
    GridFunction boundary; // only the boundary ring is read

    double p_conjugate() const { return p / (p - 1.0); }

    void validate() const {
        if (!(p > 1.0)) throw std::invalid_argument("ProblemSpec: p must exceed 1");
        if (!(eps >= 0.0)) throw std::invalid_argument("ProblemSpec: eps must be nonnegative");
        if (regime == Regime::Degenerate && p < 2.0 - 1e-12)
            throw std::invalid_argument("ProblemSpec: degenerate regime needs p >= 2");
        if (regime == Regime::Singular && p > 2.0 + 1e-12)
            throw std::invalid_argument("ProblemSpec: singular regime needs p <= 2");
        domain.validate();
        if (!boundary.domain.same_geometry(domain))
            throw std::invalid_argument("ProblemSpec: boundary grid mismatch");
        if (!boundary.all_finite())
            throw std::invalid_argument("ProblemSpec: boundary data must be finite");
    }
};

struct EnergyValue {
    double total = 0.0;
    std::array<double, 2> per_axis{0.0, 0.0};
    double eps_part = 0.0;
};

/// (1/p) sum over per-axis difference sites of w |u_{x_i}|^p. Exact for
/// piecewise-powers of affine data thanks to the transverse trapezoid weights.
EnergyValue energy_orthotropic(const ProblemSpec& spec, const GridFunction& u);

/// Degenerate: orthotropic + (p-1)/2 * eps * sum w |grad u|^2.
/// Singular:  (1/p) sum w (eps + |u_{x_i}|^2)^{p/2} per axis.
EnergyValue energy_regularized(const ProblemSpec& spec, const GridFunction& u);

/// Exact algebraic gradient of the discrete regularized energy with respect
/// to interior node values; boundary entries are zero.
GridFunction energy_gradient(const ProblemSpec& spec, const GridFunction& u);

/// Directional second derivative H(u) w (rows restricted to interior nodes).
/// Symmetric on interior-supported arguments. Rejects the singular regime at
/// eps = 0, where the weights blow up on vanishing gradient components.
GridFunction hessian_apply(const ProblemSpec& spec, const GridFunction& u,
                           const GridFunction& w);

/// sum over difference sites of w d^2 (same quadrature as the energies).
double dirichlet_quadratic(const GridFunction& u);

/// Pointwise flux and its derivative for the regularized integrand.
double flux_value(const ProblemSpec& spec, double t);
double flux_derivative(const ProblemSpec& spec, double t);

} // namespace oplab

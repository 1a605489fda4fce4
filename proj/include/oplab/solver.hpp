#pragma once

#include <cstdint>
#include <vector>

#include "oplab/energy.hpp"

namespace oplab {

struct SolverConfig {
    double grad_tol = 1e-7;       // sup-norm of the per-area residual
    int max_newton_iters = 200;
    int max_cg_iters = 4000;
    double cg_tol = 1e-10;        // relative
    double armijo_c = 1e-4;       // in (0, 1/2)
    double backtrack = 0.5;       // in (0, 1)
    std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

    void validate() const;
};

struct EpsStage {
    double eps = 0.0;
    double energy_regularized = 0.0;
    std::array<double, 2> energy_per_axis{0.0, 0.0};
    double energy_eps_part = 0.0;
    double energy_orthotropic = 0.0;
    double grad_norm = 0.0;
    int newton_iters = 0;
};

struct SolveReport {
    int iters = 0;
    std::vector<double> energy_history; // one entry per accepted step, monotone
    double final_grad_norm = 0.0;
    std::vector<EpsStage> eps_trace;
    bool converged = false;
    int failed_stage = -1;       // continuation stage that exhausted its budget
    double fitted_bound_C = 0.0; // smallest C with E_n <= E_0 + C * eps-power term
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

/// Transfinite (Coons) extension of the boundary ring; exact on the boundary
/// and reproduces bilinear data.
GridFunction boundary_interpolant(const Domain& d, const GridFunction& boundary);

/// Damped Newton with Armijo backtracking and Jacobi-preconditioned CG on the
/// matrix-free Hessian. Requires eps > 0 (throws std::invalid_argument
/// otherwise); on budget exhaustion returns the best iterate with
/// converged = false.
SolveResult solve_regularized(const ProblemSpec& spec, const SolverConfig& cfg);

/// As above but starting from a caller-supplied iterate (boundary ring is
/// overwritten with spec.boundary first).
SolveResult solve_regularized_from(const ProblemSpec& spec, const SolverConfig& cfg,
                                   const GridFunction& initial);

/// Warm-started sweep over cfg.eps_schedule; the returned function is the
/// last-stage solution. eps = 0 is never solved directly.
SolveResult continuation_solve(const ProblemSpec& spec, const SolverConfig& cfg);

/// Max over `trial_count` random interior-supported test functions (unit
/// discrete gradient p'-norm) of the eps = 0 weak form pairing
/// |sum_i sum w g_{p-2}(u_{x_i}) phi_{x_i}|.
double weak_residual(const ProblemSpec& spec, const GridFunction& u, int trial_count,
                     std::uint64_t rng_seed);

/// Sup over interior nodes of |dE/du| / (hx*hy); the mesh-consistent residual
/// that grad_tol refers to.
double residual_sup_norm(const ProblemSpec& spec, const GridFunction& gradient);

} // namespace oplab

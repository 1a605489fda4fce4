#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oplab/energy.hpp"
#include "oplab/inequalities.hpp"

namespace oplab {

struct BallTooSmall : std::runtime_error {
    BallTooSmall() : std::runtime_error("ball radius below the 3h resolution floor") {}
};

/// Componentwise g_{(p-2)/2} of the discrete gradient for p > 2; the plain
/// gradient components for 1 < p <= 2 (identity regime). Both live on their
/// staggered grids.
struct NonlinearGradient {
    GridFunction v1;
    GridFunction v2;
    double p = 2.0;
    bool identity_regime = false;

    const GridFunction& component(int j) const { return j == 0 ? v1 : v2; }
};

NonlinearGradient nonlinear_gradient(const GridFunction& u, double p);

/// max - min over the ball nodes of f's own grid. Throws EmptyBall.
double oscillation(const GridFunction& f, const BallSpec& b);
double infimum_on_ball(const GridFunction& f, const BallSpec& b);
double supremum_on_ball(const GridFunction& f, const BallSpec& b);

/// |grad u| co-located at cell centers (transverse average of the two facing
/// per-axis differences).
GridFunction gradient_magnitude_cells(const GridFunction& u);

/// 1 + sup |grad u| over the cell centers inside the ball.
double lipschitz_scale(const GridFunction& u, const BallSpec& b);

struct BallStats {
    std::array<double, 2> m{0.0, 0.0}; // inf of the (nonlinear) gradient component
    std::array<double, 2> M{0.0, 0.0}; // oscillation of the same component
    double L_R = 1.0;
};

BallStats ball_stats(const GridFunction& u, const NonlinearGradient& ng, const BallSpec& b);

struct DeGiorgiParams {
    double alpha = 0.25;
    double C0 = 1.0;   // absorbing constant inside nu, >= 1
    double nu = 0.0;   // derived
    double delta = 0.0; // derived

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("DeGiorgiParams: alpha must lie in (0,1)");
        if (!(C0 >= 1.0)) throw std::invalid_argument("DeGiorgiParams: C0 must be >= 1");
    }
};

/// Exponent of M in the level-set threshold: 2p + 4(1 - 2/p) in the
/// degenerate regime, 2 in the singular one.
double level_exponent(double p, Regime regime);

/// Fills nu and delta for a ball with scale L_R and oscillation M.
DeGiorgiParams derive_degiorgi(double alpha, double C0, double p, Regime regime, double L_R,
                               double M);

enum class LevelVerdict { TrivialHolds, HypothesisFails, HoldsAndConcludes, Violation };

struct LevelCheckResult {
    LevelVerdict verdict;
    double M = 0.0;
    double fraction = 0.0;  // node fraction of the super-level set
    double threshold = 0.0; // nu * M^exponent
    double half_osc = 0.0;  // oscillation of V on the half ball
    double bound = 0.0;     // (1 - alpha/2) * M
};

/// If |{V > (1-alpha) M} cap B_R| <= threshold |B_R| then V <= (1-alpha/2) M
/// on B_{R/2}; measures both sides on the grid. Requires 2b inside the domain.
LevelCheckResult degiorgi_level_check(const GridFunction& v_component, const BallSpec& b,
                                      const DeGiorgiParams& params, double p, Regime regime);

struct AlternativeReport {
    bool b1 = false;          // osc contracts by 7/8 on the delta-shrunk ball
    bool b2 = false;          // annulus Dirichlet energy meets the quantum
    bool shrunk_ball_empty = false;
    double M = 0.0;
    double delta = 0.0;
    double osc_shrunk = 0.0;
    double annulus_energy = 0.0;
    double quantum = 0.0;

    bool at_least_one() const { return b1 || b2; }
};

/// Oscillation-contraction vs annulus-energy dichotomy on one ball.
AlternativeReport alternatives_diagnose(const GridFunction& v_component, const BallSpec& b,
                                        const DeGiorgiParams& params, double p, Regime regime);

struct TraceStage {
    int n = 0;
    double R = 0.0;
    double M = 0.0;
    double L = 1.0;
    double nu = 0.0;
    double delta = 0.0;
    std::string alternative; // "B1", "B2", "stopped", "violation"
    double annulus_energy = 0.0;
    double quantum = 0.0;
};

struct OscillationTrace {
    std::vector<TraceStage> stages;
    double initial_dirichlet = 0.0; // Dirichlet energy of v on the initial ball
    double b2_energy_sum = 0.0;
    bool dichotomy_violation = false;
    std::string stop_reason;
};

/// Concentric-ball decay bookkeeping for component j of the nonlinear
/// gradient: R_{n+1} = delta_n R_n until the 3h resolution floor. Throws
/// BallTooSmall when R0 is already below the floor.
OscillationTrace decay_trace(const GridFunction& u, double p, Regime regime,
                             std::array<double, 2> x0, double R0, double alpha, double C0,
                             int j, int max_stages);

/// Discrete Dirichlet energy of f restricted to difference sites whose
/// midpoints fall in the (closed) ball / half-open annulus.
double dirichlet_on_ball(const GridFunction& f, const BallSpec& b);
double dirichlet_on_annulus(const GridFunction& f, const std::array<double, 2>& center,
                            double r_inner, double r_outer);

struct ApLipschitzResult {
    double ratio = 0.0;
    std::array<double, 2> sup_half{0.0, 0.0};
    double mean_p = 0.0;
};

/// sup_{B_{R/2}} |u_{x_i}| over the per-ball mean energy to the 1/p; ratio 0
/// when u is constant on the ball. Requires 2b inside the domain.
ApLipschitzResult apriori_lipschitz_check(const GridFunction& u, double p, const BallSpec& b);

struct ApSobolevResult {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

/// Dirichlet energy of g_{alpha-1}(u_{x_i}) on the half ball over the mean
/// gradient energy to the 2 alpha / p. alpha >= p/2.
ApSobolevResult apriori_sobolev_check(const GridFunction& u, double p, double alpha,
                                      const BallSpec& b);

/// Phi catalogue: C2 with Phi * Phi'' >= 0.
struct PhiSpec {
    enum class Kind { Identity, OddPower, Exp, Cosh };
    Kind kind = Kind::Identity;
    double param = 1.0; // power m >= 1 or rate lambda

    double value(double t) const;
    double deriv(double t) const;
    void validate() const;
};

/// zeta catalogue: nonnegative convex.
struct ZetaSpec {
    enum class Kind { Constant, ShiftedSquarePlus, Square };
    Kind kind = Kind::Constant;
    double param = 1.0; // constant value or shift beta

    double value(double t) const;
    void validate() const;
};

struct CaccioppoliResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0; // lhs / rhs, 0 when both vanish
};

/// Mixed-component Caccioppoli ratio for p > 2: forward differences of the
/// cell-centered nonlinear gradient against the square-rooted products on the
/// right-hand side. eta is a node-grid cutoff.
CaccioppoliResult caccioppoli_ratio_degenerate(const GridFunction& u, double p,
                                               const PhiSpec& phi, const ZetaSpec& zeta,
                                               const GridFunction& eta, int j, int k);

/// Singular-regime Caccioppoli ratio (1 < p <= 2) built on Z of the monotone
/// zeta catalogue; left-hand sum restricted to cells with |u_{x_i}| > 1e-12.
CaccioppoliResult caccioppoli_ratio_singular(const GridFunction& u, double p,
                                             const MonotoneZeta& zeta, const GridFunction& eta,
                                             int j);

struct MinPrincipleResult {
    double circle_min = 0.0;
    double ball_min = 0.0;
    double tol = 0.0;
    bool ok = false;
};

/// Minimum principle for the regularized solutions: the gradient quantity
/// (g_{(p-2)/2}(u_{x_j}) for p > 2, u_{x_j} otherwise) attains its ball
/// minimum on the bounding circle band, up to tol = max(10 grad_tol, C_h h).
MinPrincipleResult min_principle_check(const GridFunction& u_eps, double p, Regime regime,
                                       const BallSpec& b, int j, double grad_tol,
                                       double c_h = 2.0);

struct FastConvergenceResult {
    std::vector<double> Y; // Y[0] is Y_1
    double threshold = 0.0;
    bool diverged = false;
};

/// Iterates Y_{n+1} = c b^{n-1} Y_n^{1+beta} (worst case, equality) from Y_1;
/// threshold below which the sequence must vanish is c^{-1/beta}
/// b^{-(beta+1)/beta^2}. Values above 1e300 are reported as diverged.
FastConvergenceResult fast_convergence_Yn(double c, double b, double beta, double Y1, int N);

enum class SvVerdict { HypothesisFails, A1Only, A2Only, Both, Violation };

struct SvAlternativeResult {
    SvVerdict verdict = SvVerdict::HypothesisFails;
    double delta = 0.0;
    double annulus_energy = 0.0;
    double quantum = 0.0;       // gamma M^2 / (512 pi)
    double best_circle_min = 0.0;
    double super_fraction = 0.0;
};

/// Plane W^{1,2} dichotomy: for 0 <= phi <= M with super-level fraction
/// |{phi > 3/4 M}| >= gamma |B_R|, either the annulus B_R \ B_{delta R}
/// carries energy >= gamma M^2/(512 pi) or some circle band s in [delta R, R]
/// has phi >= 5/8 M everywhere on it.
SvAlternativeResult sv_alternative_check(const GridFunction& phi, double M, double gamma,
                                         const BallSpec& b);

/// (sum |f|^2 w) / (|{f != 0}| * sum |grad f|^2 w) for f supported in b.
/// f identically zero returns 0.
double poincare_check(const GridFunction& f, const BallSpec& b);

} // namespace oplab

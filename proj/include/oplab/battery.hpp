#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oplab/exact.hpp"
#include "oplab/regularity.hpp"
#include "oplab/solver.hpp"

namespace oplab {

/// Boundary data selectable by name in configs and fixtures.
struct BoundarySpec {
    std::string kind = "model_separable"; // model_separable | affine | constant | p2_harmonic
    double a = 0.0, b = 0.0;              // affine coefficients
    double value = 0.0;                   // constant
    int degree = 2;                       // harmonic polynomial degree

    GridFunction sample(const Domain& d, double p) const;
};

ProblemSpec make_problem(double p, Regime regime, const Domain& d, const BoundarySpec& bspec);

struct SolvedProblem {
    std::string name;
    ProblemSpec spec; // eps as solved at the final stage
    SolverConfig cfg;
    SolveResult result;
};

SolvedProblem solve_problem(const std::string& name, const ProblemSpec& spec,
                            const SolverConfig& cfg);

/// One line of a battery report. outcome is "ok", "hypothesis-fails",
/// "trivial", or "violation"; only "violation" fails a verify run.
struct BatteryRow {
    std::string battery;
    std::string problem;
    int instance = 0;
    std::string outcome;
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    std::string note;
};

std::string battery_rows_to_csv(const std::vector<BatteryRow>& rows);

/// Ball with 2R + 2h of clearance from the domain boundary; radii span
/// [0.08, 0.16] of the smaller extent.
BallSpec random_interior_ball(const Domain& d, Rng& rng);

std::vector<BatteryRow> alternatives_battery(const SolvedProblem& sp, int n_balls, double alpha,
                                             double C0, std::uint64_t seed, int n_threads = 1);
std::vector<BatteryRow> degiorgi_battery(const SolvedProblem& sp, int n_balls, double alpha,
                                         double C0, std::uint64_t seed, int n_threads = 1);
std::vector<BatteryRow> min_principle_battery(const SolvedProblem& sp, int n_balls, double c_h,
                                              std::uint64_t seed, int n_threads = 1);
/// Hand-built non-solution with an interior dip; every row must violate the
/// minimum principle (designed negative control).
std::vector<BatteryRow> min_principle_negative_control(const Domain& d);
std::vector<BatteryRow> apriori_battery(const SolvedProblem& sp, int n_balls,
                                        std::uint64_t seed);
std::vector<BatteryRow> caccioppoli_battery(const SolvedProblem& sp, std::uint64_t seed);
std::vector<BatteryRow> poincare_battery(const Domain& d, int count, std::uint64_t seed);
std::vector<BatteryRow> sv_battery(const Domain& d, int count, std::uint64_t seed);
std::vector<BatteryRow> decay_trace_battery(const SolvedProblem& sp, double alpha, double C0);

struct InequalityRow {
    std::string id;
    long samples = 0;
    long violations = 0;
    double worst_ratio = 0.0; // max lhs/rhs seen (sharpness probe)
    std::string argmax;       // sample achieving the worst ratio
};

std::vector<InequalityRow> inequality_battery(long samples_per_case, std::uint64_t seed);
std::string inequality_rows_to_csv(const std::vector<InequalityRow>& rows);

/// Smallest power-of-two C0 (at alpha) for which the level check reports no
/// violation on any of the sampled balls of the given solved problems.
double calibrate_c0(const std::vector<SolvedProblem>& problems, double alpha, int n_balls,
                    std::uint64_t seed);

} // namespace oplab

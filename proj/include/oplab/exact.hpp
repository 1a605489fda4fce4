#pragma once

#include <cstdint>
#include <limits>

#include "oplab/grid.hpp"

namespace oplab {

struct CurlTooLarge : std::runtime_error {
    double defect;
    explicit CurlTooLarge(double d)
        : std::runtime_error("stream_function: curl defect " + format_g17(d) +
                             " exceeds threshold"),
          defect(d) {}
};

enum class ModelKind { Separable, Affine, P2Harmonic };

/// Closed-form reference solutions. Separable is
/// |x1|^{p/(p-1)} - |x2|^{p/(p-1)}; Affine is a*x1 + b*x2; P2Harmonic is
/// Re((x1 + i x2)^degree), a solution only at p = 2.
struct ModelSolution {
    ModelKind kind = ModelKind::Separable;
    double p = 2.0;
    double a = 0.0, b = 0.0; // affine coefficients
    int degree = 2;          // harmonic polynomial degree

    void validate() const {
        if (!(p > 1.0)) throw std::invalid_argument("ModelSolution: p must exceed 1");
        if (kind == ModelKind::P2Harmonic && degree < 1)
            throw std::invalid_argument("ModelSolution: degree must be >= 1");
    }
};

double model_eval(const ModelSolution& m, double x1, double x2);

/// Analytic gradient; the separable kind is extended by 0 on the axes.
std::array<double, 2> model_gradient(const ModelSolution& m, double x1, double x2);

GridFunction sample_model(const ModelSolution& m, const Domain& d);

struct StreamResult {
    GridFunction v;  // potential on the cell-centered dual grid, v(first cell) = 0
    double defect;   // max |discrete curl| of the rotated flux over dual cells
};

/// Potential of the rotated flux (g_{p-2}(u_{x2}), -g_{p-2}(u_{x1})), built by
/// path integration first along axis 1 then axis 2. The path-dependence
/// defect is always reported; if it exceeds curl_tol, CurlTooLarge is thrown.
StreamResult stream_function(const GridFunction& u, double p,
                             double curl_tol = std::numeric_limits<double>::infinity());

/// weak_residual of v under the conjugate exponent p' = p/(p-1).
double duality_residual(const GridFunction& v, double p, int trial_count = 32,
                        std::uint64_t rng_seed = 0);

} // namespace oplab

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oplab {

// |t|^e with the usual limit conventions: pow_abs(t, 0) = 1 and a hard zero
// below 1e-300 so negative exponents cannot overflow.
inline double pow_abs(double t, double e) {
    if (e == 0.0) return 1.0;
    const double a = std::abs(t);
    if (a < 1e-300) return 0.0;
    return std::pow(a, e);
}

/// g_q(t) = |t|^q t. Odd and strictly increasing for q > -1; g_q(0) = 0 also
/// for q < 0 (limit value). Inverse is g_{-q/(q+1)}.
inline double g_q(double q, double t) {
    if (std::abs(t) < 1e-300) return 0.0;
    return pow_abs(t, q) * t;
}

/// Fixed-tree pairwise summation; deterministic for a given operand order.
double pairwise_sum(std::span<const double> xs);

/// Collects terms and reduces them pairwise at the end.
class SumAccumulator {
public:
    void reserve(std::size_t n) { terms_.reserve(n); }
    void add(double x) { terms_.push_back(x); }
    double reduce() const { return pairwise_sum(terms_); }

private:
    std::vector<double> terms_;
};

/// splitmix64 generator. Hand-rolled so that streams are identical across
/// platforms and standard library versions.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform integer in [a, b], inclusive.
    int uniform_int(int a, int b) {
        const std::uint64_t span = std::uint64_t(b - a) + 1;
        return a + int(next_u64() % span);
    }
};

/// Shortest decimal form is not required anywhere; %.17g round-trips exactly.
std::string format_g17(double x);

std::uint64_t fnv1a64(std::string_view s);
std::string hex16(std::uint64_t v);

/// Deterministic static partition across threads; body(i) must only touch
/// state owned by index i.
void parallel_for(int n, int n_threads, const std::function<void(int)>& body);

} // namespace oplab

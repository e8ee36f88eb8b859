#ifndef ALSPIA_CHEBYSHEV_HPP_
#define ALSPIA_CHEBYSHEV_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace alspia {

/// Extreme eigenvalues of the normal matrix. u == 0 marks the singular case.
struct SpectralBounds {
    double u = 0.0;
    double v = 0.0;

    bool valid() const { return v > 0.0 && u >= 0.0 && u <= v; }
};

enum class ScheduleKind { Singular, Nonsingular, Constant };

inline const char* to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::Singular: return "singular";
        case ScheduleKind::Nonsingular: return "nonsingular";
        case ScheduleKind::Constant: return "constant";
    }
    return "?";
}

/// An ordered cycle of positive step sizes together with the spectral
/// bounds they were derived from. Immutable after construction; the solver
/// consumes steps cyclically (index = iteration mod cycle length).
struct StepSchedule {
    std::vector<double> steps;
    ScheduleKind kind = ScheduleKind::Constant;
    SpectralBounds bounds;

    std::size_t cycle_length() const { return steps.size(); }
    double step(std::size_t iteration) const { return steps[iteration % steps.size()]; }
};

/// Chebyshev polynomial of the first kind, P_k(x), by the three-term
/// recurrence P_{k+1}(x) = 2 x P_k(x) - P_{k-1}(x).
inline double cheb_eval(int k, double x) {
    if (k < 0) throw std::invalid_argument("cheb_eval: k must be >= 0");
    if (!std::isfinite(x)) throw std::invalid_argument("cheb_eval: x must be finite");
    if (k == 0) return 1.0;
    double pm = 1.0;  // P_{j-1}
    double p = x;     // P_j
    for (int j = 1; j < k; ++j) {
        const double pn = 2.0 * x * p - pm;
        pm = p;
        p = pn;
    }
    return p;
}

/// Zeros of P_k: cos((2l+1)pi/(2k)) for l = 0..k-1, in that index order
/// (decreasing in value).
inline std::vector<double> cheb_zeros(int k) {
    if (k < 1) throw std::invalid_argument("cheb_zeros: k must be >= 1");
    std::vector<double> z(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l)
        z[static_cast<std::size_t>(l)] = std::cos((2.0 * l + 1.0) * std::numbers::pi / (2.0 * k));
    return z;
}

namespace detail {
// Spectra narrower than this (relative to v) are treated as a single point.
inline constexpr double kPointSpectrumTol = 1e-12;
}  // namespace detail

/// Step cycle for a positive definite normal matrix with eigenvalues in
/// [u, v], u > 0: steps[l] = 2 / ((v+u) + (v-u) cos((2l+1)pi/(2k))).
/// Each step lies strictly inside (1/v, 1/u). A spectrum narrower than
/// 1e-12 * v collapses to a Constant schedule with step 1/v.
inline StepSchedule schedule_nonsingular(SpectralBounds b, int k) {
    if (!(b.u > 0.0) || !(b.v >= b.u))
        throw std::invalid_argument("schedule_nonsingular: requires 0 < u <= v");
    if (k < 1) throw std::invalid_argument("schedule_nonsingular: k must be >= 1");

    StepSchedule s;
    s.bounds = b;
    s.steps.resize(static_cast<std::size_t>(k));
    if (b.v - b.u < detail::kPointSpectrumTol * b.v) {
        s.kind = ScheduleKind::Constant;
        std::fill(s.steps.begin(), s.steps.end(), 1.0 / b.v);
        return s;
    }
    s.kind = ScheduleKind::Nonsingular;
    for (int l = 0; l < k; ++l) {
        const double c = std::cos((2.0 * l + 1.0) * std::numbers::pi / (2.0 * k));
        s.steps[static_cast<std::size_t>(l)] = 2.0 / ((b.v + b.u) + (b.v - b.u) * c);
    }
    return s;
}

/// Step cycle for a rank-deficient normal matrix with largest eigenvalue v.
/// With x = cos((2k+1)pi/(2(k+1))), the root of P_{k+1} nearest -1,
/// steps[l] = (1 - x) / (v (cos((2l+1)pi/(2(k+1))) - x)) for l = 0..k-1.
inline StepSchedule schedule_singular(double v, int k) {
    if (!(v > 0.0)) throw std::invalid_argument("schedule_singular: v must be > 0");
    if (k < 1) throw std::invalid_argument("schedule_singular: k must be >= 1");

    StepSchedule s;
    s.kind = ScheduleKind::Singular;
    s.bounds = SpectralBounds{0.0, v};
    s.steps.resize(static_cast<std::size_t>(k));
    const double xk = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * (k + 1.0)));
    for (int l = 0; l < k; ++l) {
        const double c = std::cos((2.0 * l + 1.0) * std::numbers::pi / (2.0 * (k + 1.0)));
        s.steps[static_cast<std::size_t>(l)] = (1.0 - xk) / (v * (c - xk));
    }
    return s;
}

/// Guaranteed contraction after one full cycle of k steps:
///   Singular:     v pi / (2 (k+1)^2)   on |lambda * prod(1 - w_l lambda)|
///   Nonsingular:  2 ((sqrt(v)-sqrt(u))/(sqrt(v)+sqrt(u)))^k
inline double rate_bound(SpectralBounds b, int k, ScheduleKind kind) {
    if (k < 1) throw std::invalid_argument("rate_bound: k must be >= 1");
    switch (kind) {
        case ScheduleKind::Singular: {
            if (b.u != 0.0 || !(b.v > 0.0))
                throw std::invalid_argument("rate_bound: Singular requires u == 0 and v > 0");
            const double kp1 = static_cast<double>(k) + 1.0;
            return b.v * std::numbers::pi / (2.0 * kp1 * kp1);
        }
        case ScheduleKind::Nonsingular: {
            if (!(b.u > 0.0) || !(b.v >= b.u))
                throw std::invalid_argument("rate_bound: Nonsingular requires 0 < u <= v");
            const double su = std::sqrt(b.u);
            const double sv = std::sqrt(b.v);
            return 2.0 * std::pow((sv - su) / (sv + su), k);
        }
        case ScheduleKind::Constant:
            throw std::invalid_argument("rate_bound: no bound for Constant schedules");
    }
    throw std::invalid_argument("rate_bound: bad kind");
}

inline constexpr int kDefaultSingularCycle = 16;
inline constexpr int kMinCycle = 4;
inline constexpr int kMaxCycle = 64;

/// Cycle length for a target per-cycle reduction eps: the smallest k with
/// 2 ((sqrt(v)-sqrt(u))/(sqrt(v)+sqrt(u)))^k <= eps, clamped to [4, 64].
inline int default_cycle_nonsingular(SpectralBounds b, double eps_target = 1e-6) {
    if (!(b.u > 0.0) || !(b.v >= b.u))
        throw std::invalid_argument("default_cycle_nonsingular: requires 0 < u <= v");
    if (b.v - b.u < detail::kPointSpectrumTol * b.v) return kMinCycle;
    const double su = std::sqrt(b.u);
    const double sv = std::sqrt(b.v);
    const double growth = (sv + su) / (sv - su);
    const double k = std::ceil(std::log(2.0 / eps_target) / std::log(growth));
    return static_cast<int>(std::clamp(k, static_cast<double>(kMinCycle),
                                       static_cast<double>(kMaxCycle)));
}

}  // namespace alspia

#endif  // ALSPIA_CHEBYSHEV_HPP_

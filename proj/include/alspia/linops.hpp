#ifndef ALSPIA_LINOPS_HPP_
#define ALSPIA_LINOPS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "alspia/bspline.hpp"
#include "alspia/chebyshev.hpp"

namespace alspia {

namespace detail {

/// splitmix64 stream for deterministic start vectors.
class SplitMix {
  public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [-1, 1).
    double next_signed() {
        return 2.0 * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53) - 1.0;
    }

  private:
    std::uint64_t state_;
};

inline constexpr std::uint64_t kEigenSeed = 0xA15;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Result of an extreme-eigenvalue estimation. residual is the Rayleigh
/// residual ||A x - lambda x|| at the unit vector x reached on termination.
struct EigenEstimate {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

enum class Rank { FullRank, RankDeficient };

inline const char* to_string(Rank r) {
    return r == Rank::FullRank ? "full-rank" : "rank-deficient";
}

/// Matrix-free action of the normal matrix. Curve mode wraps one
/// collocation matrix A and acts as A^T A. Surface mode wraps the two
/// factor collocations (A for the row direction, By for the column
/// direction, both stored data-major) and acts as the normal matrix of
/// the tensor-product operator without forming any Kronecker product:
/// the forward map is vec(A P By^T) and the adjoint vec(A^T R By), on
/// column-major grids.
class NormalOperator {
  public:
    enum class Mode { Curve, Surface };

    static NormalOperator curve(CollocationMatrix a) {
        NormalOperator op;
        op.mode_ = Mode::Curve;
        op.a_ = std::move(a);
        return op;
    }

    static NormalOperator surface(CollocationMatrix a, CollocationMatrix by) {
        if (a.cols() != by.cols())
            throw std::invalid_argument("NormalOperator::surface: basis counts differ");
        NormalOperator op;
        op.mode_ = Mode::Surface;
        op.a_ = std::move(a);
        op.by_ = std::move(by);
        return op;
    }

    Mode mode() const { return mode_; }
    const CollocationMatrix& factor_a() const { return a_; }
    const CollocationMatrix& factor_by() const { return by_; }

    std::size_t control_size() const {
        return mode_ == Mode::Curve ? a_.cols() : a_.cols() * by_.cols();
    }
    std::size_t data_size() const {
        return mode_ == Mode::Curve ? a_.rows() : a_.rows() * by_.rows();
    }

    /// Forward map, control space -> data space.
    void apply_A(std::span<const double> p, std::span<double> out) const {
        if (p.size() != control_size() || out.size() != data_size())
            throw std::invalid_argument("apply_A: dimension mismatch");
        if (mode_ == Mode::Curve) {
            a_.apply(p, out);
            return;
        }
        // tmp = A P, then out = tmp By^T; grids are column-major. Local
        // scratch keeps apply_A re-entrant.
        const std::size_t n1 = a_.cols(), m1 = a_.rows(), p1 = by_.rows();
        std::vector<double> tmp(m1 * n1, 0.0);
        for (std::size_t j = 0; j < n1; ++j)
            a_.apply(p.subspan(j * n1, n1), std::span<double>(tmp).subspan(j * m1, m1));
        for (std::size_t l = 0; l < p1; ++l) {
            const auto& row = by_.row(l);
            for (std::size_t h = 0; h < m1; ++h) {
                double s = 0.0;
                for (int t = 0; t < row.len; ++t)
                    s += row.v[static_cast<std::size_t>(t)] *
                         tmp[h + static_cast<std::size_t>(row.start + t) * m1];
                out[h + l * m1] = s;
            }
        }
    }

    /// Adjoint map, data space -> control space.
    void apply_At(std::span<const double> r, std::span<double> out) const {
        if (r.size() != data_size() || out.size() != control_size())
            throw std::invalid_argument("apply_At: dimension mismatch");
        if (mode_ == Mode::Curve) {
            a_.apply_transpose(r, out);
            return;
        }
        // tmp = A^T R, then out = tmp By.
        const std::size_t n1 = a_.cols(), m1 = a_.rows(), p1 = by_.rows();
        std::vector<double> tmp(n1 * p1, 0.0);
        for (std::size_t l = 0; l < p1; ++l)
            a_.apply_transpose(r.subspan(l * m1, m1),
                               std::span<double>(tmp).subspan(l * n1, n1));
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t l = 0; l < p1; ++l) {
            const auto& row = by_.row(l);
            for (int t = 0; t < row.len; ++t) {
                const double w = row.v[static_cast<std::size_t>(t)];
                const std::size_t j = static_cast<std::size_t>(row.start + t);
                for (std::size_t i = 0; i < n1; ++i) out[i + j * n1] += w * tmp[i + l * n1];
            }
        }
    }

    /// x -> A^T A x (the normal matrix action).
    void apply_normal(std::span<const double> x, std::span<double> out) const {
        std::vector<double> data(data_size(), 0.0);
        apply_A(x, data);
        apply_At(data, out);
    }

    /// Column sums of the forward operator; for a surface these factor into
    /// the product of the two collocation column sums.
    std::vector<double> column_support_sums() const {
        if (mode_ == Mode::Curve) return a_.column_sums();
        const auto sa = a_.column_sums();
        const auto sb = by_.column_sums();
        std::vector<double> s(control_size());
        for (std::size_t j = 0; j < sb.size(); ++j)
            for (std::size_t i = 0; i < sa.size(); ++i) s[i + j * sa.size()] = sa[i] * sb[j];
        return s;
    }

    /// True when some basis function has no data support at all; e_i is
    /// then an exact null vector of the normal matrix.
    bool has_empty_column() const {
        for (double s : column_support_sums())
            if (s == 0.0) return true;
        return false;
    }

  private:
    Mode mode_ = Mode::Curve;
    CollocationMatrix a_;
    CollocationMatrix by_;
};

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (diag a, offdiag b)
/// strictly below x, by Sturm sequence counting.
inline int sturm_count_below(const std::vector<double>& a, const std::vector<double>& b,
                             double x, double pivmin) {
    int count = 0;
    double d = a[0] - x;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < a.size(); ++i) {
        d = (a[i] - x) - b[i - 1] * b[i - 1] / d;
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
    }
    return count;
}

/// Largest eigenvalue of the symmetric tridiagonal by bisection.
inline double tridiag_lambda_max(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t k = a.size();
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (double v : b) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    const double pivmin = 1e-280 * scale;
    double lo = a[0], hi = a[0];
    for (std::size_t i = 0; i < k; ++i) {
        const double r = (i > 0 ? std::abs(b[i - 1]) : 0.0) + (i + 1 < k ? std::abs(b[i]) : 0.0);
        lo = std::min(lo, a[i] - r);
        hi = std::max(hi, a[i] + r);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count_below(a, b, mid, pivmin) >= static_cast<int>(k))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

/// One inverse-iteration solve (T - sigma I) z = r for the tridiagonal,
/// Gaussian elimination with partial pivoting (bandwidth grows to 2).
inline std::vector<double> tridiag_shifted_solve(const std::vector<double>& a,
                                                 const std::vector<double>& b, double sigma,
                                                 std::vector<double> rhs) {
    const std::size_t k = a.size();
    std::vector<double> d(k), e(k, 0.0), f(k, 0.0), sub(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) d[i] = a[i] - sigma;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        e[i] = b[i];
        sub[i + 1] = b[i];
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (std::abs(sub[i + 1]) > std::abs(d[i])) {
            std::swap(d[i], sub[i + 1]);
            const double t1 = e[i], t2 = f[i];
            e[i] = d[i + 1];
            d[i + 1] = t1;
            f[i] = (i + 2 < k) ? e[i + 1] : 0.0;
            if (i + 2 < k) e[i + 1] = t2;
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (d[i] == 0.0) d[i] = 1e-290;
        const double m = sub[i + 1] / d[i];
        d[i + 1] -= m * e[i];
        if (i + 2 < k) e[i + 1] -= m * f[i];
        rhs[i + 1] -= m * rhs[i];
    }
    if (d[k - 1] == 0.0) d[k - 1] = 1e-290;
    std::vector<double> z(k, 0.0);
    for (std::size_t ii = k; ii-- > 0;) {
        double acc = rhs[ii];
        if (ii + 1 < k) acc -= e[ii] * z[ii + 1];
        if (ii + 2 < k) acc -= f[ii] * z[ii + 2];
        z[ii] = acc / d[ii];
    }
    return z;
}

/// Largest eigenvalue of a symmetric PSD operator by the Lanczos process
/// with full reorthogonalization and a deterministic start vector. The
/// Ritz value approaches the extreme from below; `residual` is the explicit
/// ||B y - rho y|| of the returned Ritz pair. `budget` caps the number of
/// Lanczos steps (matrix applications).
template <typename Apply>
EigenEstimate lanczos_largest(std::size_t dim, Apply&& apply, double tol, int budget) {
    const int cap = static_cast<int>(
        std::min<std::size_t>(dim, static_cast<std::size_t>(std::max(1, std::min(budget, 512)))));

    SplitMix rng(kEigenSeed);
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;  // beta[i] couples step i and i+1
    std::vector<double> v(dim), w(dim);
    for (double& e : v) e = rng.next_signed();
    double nv = norm(v);
    if (nv == 0.0) {
        v[0] = 1.0;
        nv = 1.0;
    }
    for (double& e : v) e /= nv;

    EigenEstimate best;
    auto ritz_check = [&](EigenEstimate& out) {
        const double lam = tridiag_lambda_max(alpha, beta);
        // Ritz vector via one inverse-iteration pass on the tridiagonal.
        std::vector<double> s(alpha.size(), 1.0);
        const double shift = lam * (1.0 + 1e-13) + 1e-290;
        s = tridiag_shifted_solve(alpha, beta, shift, std::move(s));
        double ns = norm(s);
        if (ns == 0.0) {
            s.assign(alpha.size(), 0.0);
            s.back() = 1.0;
            ns = 1.0;
        }
        std::vector<double> y(dim, 0.0);
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double c = s[j] / ns;
            for (std::size_t i = 0; i < dim; ++i) y[i] += c * basis[j][i];
        }
        const double ny = norm(y);
        if (ny == 0.0) return;
        for (double& e : y) e /= ny;
        std::vector<double> by(dim);
        apply(std::span<const double>(y), std::span<double>(by));
        const double rho = dot(y, by);
        double res_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double r = by[i] - rho * y[i];
            res_sq += r * r;
        }
        out.value = rho;
        out.residual = std::sqrt(res_sq);
        out.converged = out.residual <= tol * std::max(std::abs(rho), 1e-300);
    };

    for (int step = 0; step < cap; ++step) {
        apply(std::span<const double>(v), std::span<double>(w));
        const double a = dot(v, w);
        alpha.push_back(a);
        basis.push_back(v);
        for (std::size_t i = 0; i < dim; ++i)
            w[i] -= a * v[i] + (step > 0 ? beta[static_cast<std::size_t>(step) - 1] *
                                               basis[static_cast<std::size_t>(step) - 1][i]
                                         : 0.0);
        // Full reorthogonalization keeps the basis usable for Ritz vectors.
        for (const auto& u : basis) {
            const double c = dot(w, u);
            for (std::size_t i = 0; i < dim; ++i) w[i] -= c * u[i];
        }
        const double nb = norm(w);
        best.iterations = step + 1;

        const bool breakdown = nb <= 1e-14 * std::max(1.0, std::abs(a));
        const bool at_cap = step + 1 == cap;
        if (breakdown || at_cap || (step + 1) % 16 == 0) {
            ritz_check(best);
            if (best.converged || breakdown) {
                if (breakdown && !best.converged) {
                    // Invariant subspace reached: the Ritz pair is as good
                    // as this start vector can make it.
                    best.converged = best.residual <= 1e-6 * std::max(std::abs(best.value), 1e-300);
                }
                return best;
            }
        }
        beta.push_back(nb);
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nb;
    }
    return best;
}

// Margin applied so that the returned v slightly over-estimates (and u
// slightly under-estimates) the true extreme: schedules built from the
// returned bounds then cover the whole spectrum.
inline double safety_factor(double tol) { return 1.0 + 10.0 * tol; }

// A Ritz value that stalls above tol but within sqrt(tol) of the extreme
// is still usable: its value error is on the order of the residual, and
// the 10x residual margin below absorbs it. Dense clusters at the top of
// large collocation spectra make the strict tolerance unreachable within
// the step cap.
inline void accept_with_margin(EigenEstimate& est, double tol) {
    const double scale = std::max(std::abs(est.value), 1e-300);
    if (!est.converged && est.residual <= std::sqrt(tol) * scale) est.converged = true;
    est.value += 10.0 * est.residual;
}

inline EigenEstimate largest_eig_curve_factor(const CollocationMatrix& a, double tol,
                                              int max_iter) {
    std::vector<double> data(a.rows());
    auto est = lanczos_largest(
        a.cols(),
        [&](std::span<const double> x, std::span<double> out) {
            a.apply(x, data);
            a.apply_transpose(data, out);
        },
        tol, max_iter);
    accept_with_margin(est, tol);
    est.value *= safety_factor(tol);
    return est;
}

}  // namespace detail

/// Largest eigenvalue of the normal matrix, matrix-free Lanczos with a
/// deterministic start vector. Surface mode multiplies the factor maxima
/// (eigenvalues of a Kronecker product of symmetric PSD factors are the
/// pairwise products). The returned value carries a (1 + 10 tol) margin so
/// it upper-bounds the true eigenvalue once the iteration has converged.
inline EigenEstimate largest_eigenvalue(const NormalOperator& op, double tol = 1e-8,
                                        int max_iter = 5000) {
    if (!(tol > 0.0)) throw std::invalid_argument("largest_eigenvalue: tol must be > 0");
    if (op.mode() == NormalOperator::Mode::Curve)
        return detail::largest_eig_curve_factor(op.factor_a(), tol, max_iter);

    const auto ea = detail::largest_eig_curve_factor(op.factor_a(), tol, max_iter);
    const auto eb = detail::largest_eig_curve_factor(op.factor_by(), tol, max_iter);
    EigenEstimate est;
    est.value = ea.value * eb.value;
    est.residual = std::max(ea.residual, eb.residual);
    est.iterations = ea.iterations + eb.iterations;
    est.converged = ea.converged && eb.converged;
    return est;
}

namespace detail {

inline EigenEstimate smallest_eig_factor(const CollocationMatrix& a, double v, double tol,
                                         int max_iter, double rank_threshold) {
    for (double s : a.column_sums()) {
        if (s == 0.0) {
            // Structurally empty column: e_i is an exact null vector, so the
            // smallest eigenvalue is exactly 0. The shifted power iteration
            // could not certify this within any reasonable budget.
            EigenEstimate est;
            est.value = 0.0;
            est.residual = 0.0;
            est.iterations = 0;
            est.converged = true;
            return est;
        }
    }
    std::vector<double> data(a.rows());
    auto est = lanczos_largest(
        a.cols(),
        [&](std::span<const double> x, std::span<double> out) {
            a.apply(x, data);
            a.apply_transpose(data, out);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = v * x[i] - out[i];
        },
        tol, max_iter);
    accept_with_margin(est, tol);
    double u = v - est.value * safety_factor(tol);
    if (u < rank_threshold * v) u = 0.0;
    est.value = u;
    return est;
}

}  // namespace detail

/// Smallest eigenvalue via the same extreme-eigenvalue iteration on the
/// shifted operator v I - A^T A (v from largest_eigenvalue). Estimates
/// below rank_threshold * v are clamped to exactly 0, declaring the
/// singular regime. A structurally empty collocation column short-circuits
/// to an exact 0.
inline EigenEstimate smallest_eigenvalue(const NormalOperator& op, double v, double tol = 1e-8,
                                         int max_iter = 5000, double rank_threshold = 1e-10) {
    if (!(v > 0.0)) throw std::invalid_argument("smallest_eigenvalue: v must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("smallest_eigenvalue: tol must be > 0");
    if (op.mode() == NormalOperator::Mode::Curve)
        return detail::smallest_eig_factor(op.factor_a(), v, tol, max_iter, rank_threshold);

    // Factor-wise: min over the Kronecker spectrum is the product of the
    // factor minima. Each factor needs its own largest eigenvalue as shift.
    const auto va = detail::largest_eig_curve_factor(op.factor_a(), tol, max_iter);
    const auto vb = detail::largest_eig_curve_factor(op.factor_by(), tol, max_iter);
    const auto ua = detail::smallest_eig_factor(op.factor_a(), va.value, tol, max_iter,
                                                rank_threshold);
    const auto ub = detail::smallest_eig_factor(op.factor_by(), vb.value, tol, max_iter,
                                                rank_threshold);
    EigenEstimate est;
    est.value = ua.value * ub.value;
    if (est.value < rank_threshold * v) est.value = 0.0;
    est.residual = std::max(ua.residual, ub.residual);
    est.iterations = ua.iterations + ub.iterations;
    est.converged = ua.converged && ub.converged;
    return est;
}

/// Routes to the singular or nonsingular step-size regime.
inline Rank rank_detect(const NormalOperator& op, double v, double tol = 1e-8,
                        int max_iter = 5000, double rank_threshold = 1e-10) {
    const auto u = smallest_eigenvalue(op, v, tol, max_iter, rank_threshold);
    return u.value == 0.0 ? Rank::RankDeficient : Rank::FullRank;
}

/// Dense least-squares oracle: solves A^T A p = A^T q by a symmetric
/// positive semidefinite Cholesky factorization with diagonal pivoting.
/// For rank-deficient systems the free pivots are set to zero, giving a
/// particular (not minimum-norm) solution. Intended for small instances.
struct DirectSolveResult {
    std::vector<double> solution;
    int rank = 0;
};

inline DirectSolveResult direct_lsq_solve(const CollocationMatrix& a,
                                          std::span<const double> q) {
    const std::size_t m1 = a.rows();
    const std::size_t n1 = a.cols();
    if (q.size() != m1) throw std::invalid_argument("direct_lsq_solve: rhs size mismatch");
    if (m1 > 500 || n1 > 500)
        throw std::invalid_argument("direct_lsq_solve: oracle limited to 500x500");

    // Dense normal matrix and right-hand side.
    const auto dense = a.to_dense();
    std::vector<std::vector<double>> g(n1, std::vector<double>(n1, 0.0));
    std::vector<double> b(n1, 0.0);
    for (std::size_t j = 0; j < m1; ++j) {
        for (std::size_t i = 0; i < n1; ++i) {
            if (dense[j][i] == 0.0) continue;
            b[i] += dense[j][i] * q[j];
            for (std::size_t t = i; t < n1; ++t) g[i][t] += dense[j][i] * dense[j][t];
        }
    }
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t t = 0; t < i; ++t) g[i][t] = g[t][i];

    // Pivoted Cholesky: G = P L L^T P^T, stopping at the numerical rank.
    std::vector<std::size_t> perm(n1);
    for (std::size_t i = 0; i < n1; ++i) perm[i] = i;
    std::vector<double> d(n1);
    for (std::size_t i = 0; i < n1; ++i) d[i] = g[i][i];
    double dmax0 = 0.0;
    for (double x : d) dmax0 = std::max(dmax0, x);
    const double pivot_tol = static_cast<double>(n1) * 1e-14 * dmax0;

    std::vector<std::vector<double>> lf(n1, std::vector<double>(n1, 0.0));
    std::size_t rank = 0;
    for (std::size_t s = 0; s < n1; ++s) {
        std::size_t best = s;
        for (std::size_t t = s + 1; t < n1; ++t)
            if (d[perm[t]] > d[perm[best]]) best = t;
        if (!(d[perm[best]] > pivot_tol)) break;
        std::swap(perm[s], perm[best]);
        std::swap(lf[s], lf[best]);  // keep computed factor rows aligned with perm
        const std::size_t ps = perm[s];
        lf[s][s] = std::sqrt(d[ps]);
        for (std::size_t r = s + 1; r < n1; ++r) {
            const std::size_t pr = perm[r];
            double acc = g[pr][ps];
            for (std::size_t t = 0; t < s; ++t) acc -= lf[r][t] * lf[s][t];
            lf[r][s] = acc / lf[s][s];
            d[pr] -= lf[r][s] * lf[r][s];
        }
        ++rank;
    }

    // Solve L w = (P^T b) then L^T z = w on the leading rank-by-rank block;
    // b = A^T q is always in the range of A^T A, so this is consistent.
    std::vector<double> w(rank, 0.0);
    for (std::size_t s = 0; s < rank; ++s) {
        double acc = b[perm[s]];
        for (std::size_t t = 0; t < s; ++t) acc -= lf[s][t] * w[t];
        w[s] = acc / lf[s][s];
    }
    std::vector<double> z(rank, 0.0);
    for (std::size_t si = rank; si-- > 0;) {
        double acc = w[si];
        for (std::size_t t = si + 1; t < rank; ++t) acc -= lf[t][si] * z[t];
        z[si] = acc / lf[si][si];
    }
    DirectSolveResult out;
    out.rank = static_cast<int>(rank);
    out.solution.assign(n1, 0.0);
    for (std::size_t s = 0; s < rank; ++s) out.solution[perm[s]] = z[s];
    return out;
}

}  // namespace alspia

#endif  // ALSPIA_LINOPS_HPP_

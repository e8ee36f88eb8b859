#ifndef ALSPIA_BSPLINE_HPP_
#define ALSPIA_BSPLINE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alspia/geometry.hpp"

namespace alspia {

/// Data parameters in [0, 1], strictly increasing, endpoints exactly 0 and 1.
struct ParamSequence {
    std::vector<double> values;

    static ParamSequence checked(std::vector<double> v) {
        if (v.size() < 2) throw std::invalid_argument("ParamSequence: need at least 2 values");
        if (v.front() != 0.0 || v.back() != 1.0)
            throw std::invalid_argument("ParamSequence: endpoints must be exactly 0 and 1");
        for (std::size_t j = 1; j < v.size(); ++j)
            if (!(v[j] > v[j - 1]))
                throw std::invalid_argument("ParamSequence: values must be strictly increasing");
        ParamSequence p;
        p.values = std::move(v);
        return p;
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }
};

/// Clamped knot vector for degree-3 B-splines on [0, 1]:
/// {0 x4, interior knots, 1 x4}. Basis count is knots.size() - degree - 1.
struct KnotVector {
    std::vector<double> knots;
    int degree = 3;

    int basis_count() const { return static_cast<int>(knots.size()) - degree - 1; }
};

/// Normalized accumulated chord parameterization of an ordered point set.
/// Rejects coincident consecutive points (they would break the strictly
/// increasing parameter requirement).
inline ParamSequence chord_parameterize(const PointSet& pts) {
    const std::size_t m1 = pts.size();
    if (m1 < 2) throw std::invalid_argument("chord_parameterize: need at least 2 points");
    std::vector<double> d(m1 - 1);
    double total = 0.0;
    for (std::size_t j = 1; j < m1; ++j) {
        d[j - 1] = pts.distance(j, j - 1);
        if (d[j - 1] == 0.0)
            throw std::invalid_argument(
                "chord_parameterize: coincident consecutive points at index " + std::to_string(j));
        total += d[j - 1];
    }
    if (!(total > 0.0)) throw std::invalid_argument("chord_parameterize: zero total chord length");
    std::vector<double> x(m1);
    x[0] = 0.0;
    double acc = 0.0;
    for (std::size_t j = 1; j < m1; ++j) {
        acc += d[j - 1];
        x[j] = acc / total;
    }
    x[m1 - 1] = 1.0;
    return ParamSequence::checked(std::move(x));
}

/// Row-direction grid parameters: increments proportional to the chord
/// lengths between consecutive grid rows, summed across all columns.
inline ParamSequence chord_parameterize_rows(const PointGrid& g) {
    if (g.rows < 2) throw std::invalid_argument("chord_parameterize_rows: need at least 2 rows");
    std::vector<double> inc(g.rows - 1);
    double total = 0.0;
    for (std::size_t h = 1; h < g.rows; ++h) {
        double s = 0.0;
        for (std::size_t t = 0; t < g.cols; ++t) s += g.row_distance(h, h - 1, t);
        if (s == 0.0)
            throw std::invalid_argument("chord_parameterize_rows: coincident consecutive rows");
        inc[h - 1] = s;
        total += s;
    }
    std::vector<double> x(g.rows);
    x[0] = 0.0;
    double acc = 0.0;
    for (std::size_t h = 1; h < g.rows; ++h) {
        acc += inc[h - 1];
        x[h] = acc / total;
    }
    x[g.rows - 1] = 1.0;
    return ParamSequence::checked(std::move(x));
}

/// Column-direction counterpart of chord_parameterize_rows.
inline ParamSequence chord_parameterize_cols(const PointGrid& g) {
    if (g.cols < 2) throw std::invalid_argument("chord_parameterize_cols: need at least 2 cols");
    std::vector<double> inc(g.cols - 1);
    double total = 0.0;
    for (std::size_t l = 1; l < g.cols; ++l) {
        double s = 0.0;
        for (std::size_t t = 0; t < g.rows; ++t) s += g.col_distance(t, l, l - 1);
        if (s == 0.0)
            throw std::invalid_argument("chord_parameterize_cols: coincident consecutive columns");
        inc[l - 1] = s;
        total += s;
    }
    std::vector<double> y(g.cols);
    y[0] = 0.0;
    double acc = 0.0;
    for (std::size_t l = 1; l < g.cols; ++l) {
        acc += inc[l - 1];
        y[l] = acc / total;
    }
    y[g.cols - 1] = 1.0;
    return ParamSequence::checked(std::move(y));
}

/// Clamped cubic knot vector from data parameters, n+1 basis functions:
/// interior knot j+3 averages neighbouring parameters via
///   i = floor(j d), a = j d - i, d = (m+1)/(n-2),
///   knot = (1-a) x_{i-1} + a x_i,   j = 1..n-3.
inline KnotVector build_knots(const ParamSequence& params, int n, int degree = 3) {
    if (degree != 3) throw std::invalid_argument("build_knots: only degree 3 is supported");
    const std::size_t m = params.size() - 1;
    if (n < 4) throw std::invalid_argument("build_knots: n must be >= 4");
    if (m < static_cast<std::size_t>(n)) throw std::invalid_argument("build_knots: requires m >= n");

    KnotVector kv;
    kv.degree = degree;
    kv.knots.assign(4, 0.0);
    const double d = (static_cast<double>(m) + 1.0) / (static_cast<double>(n) - 2.0);
    for (int j = 1; j <= n - 3; ++j) {
        const double jd = j * d;
        const auto i = static_cast<std::size_t>(std::floor(jd));
        const double a = jd - static_cast<double>(i);
        if (i < 1 || i > m)
            throw std::invalid_argument("build_knots: knot index out of range");
        const double knot = (1.0 - a) * params[i - 1] + a * params[i];
        if (!(knot > 0.0 && knot < 1.0))
            throw std::invalid_argument("build_knots: interior knot not strictly inside (0,1)");
        if (!kv.knots.empty() && knot < kv.knots.back())
            throw std::invalid_argument("build_knots: knots not non-decreasing");
        kv.knots.push_back(knot);
    }
    kv.knots.insert(kv.knots.end(), 4, 1.0);
    return kv;
}

namespace detail {

/// Index of the knot span containing x: largest s with knots[s] <= x and
/// knots[s] < knots[s+1]. x == 1 maps to the last nonempty span, which makes
/// the basis closed on the right at the final knot.
inline int find_span(const KnotVector& kv, double x) {
    const int n = kv.basis_count() - 1;
    const int p = kv.degree;
    if (x >= kv.knots[static_cast<std::size_t>(n + 1)]) return n;
    if (x <= kv.knots[static_cast<std::size_t>(p)]) return p;
    int lo = p, hi = n + 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (x < kv.knots[static_cast<std::size_t>(mid)])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

/// Values of the degree+1 basis functions that are nonzero on the span of x.
/// out[t] is the value of basis (span - degree + t).
inline void basis_values_on_span(const KnotVector& kv, int span, double x,
                                 std::array<double, 4>& out) {
    const int p = kv.degree;
    std::array<double, 4> left{}, right{};
    out[0] = 1.0;
    for (int r = 1; r <= p; ++r) {
        left[static_cast<std::size_t>(r)] = x - kv.knots[static_cast<std::size_t>(span + 1 - r)];
        right[static_cast<std::size_t>(r)] = kv.knots[static_cast<std::size_t>(span + r)] - x;
        double saved = 0.0;
        for (int t = 0; t < r; ++t) {
            const double temp = out[static_cast<std::size_t>(t)] /
                                (right[static_cast<std::size_t>(t + 1)] +
                                 left[static_cast<std::size_t>(r - t)]);
            out[static_cast<std::size_t>(t)] =
                saved + right[static_cast<std::size_t>(t + 1)] * temp;
            saved = left[static_cast<std::size_t>(r - t)] * temp;
        }
        out[static_cast<std::size_t>(r)] = saved;
    }
}

}  // namespace detail

/// Value of the i-th cubic B-spline basis at x in [0, 1].
inline double basis_eval(const KnotVector& kv, int i, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("basis_eval: x outside [0,1]");
    const int n = kv.basis_count() - 1;
    if (i < 0 || i > n) throw std::invalid_argument("basis_eval: basis index out of range");
    const int span = detail::find_span(kv, x);
    if (i < span - kv.degree || i > span) return 0.0;
    std::array<double, 4> vals{};
    detail::basis_values_on_span(kv, span, x, vals);
    return vals[static_cast<std::size_t>(i - (span - kv.degree))];
}

/// Sparse banded matrix with at most 4 contiguous nonzeros per row.
/// Holds B-spline collocation matrices A[j][i] = mu_i(x_j) and the small
/// synthetic operators the tests construct.
class CollocationMatrix {
  public:
    struct Row {
        int start = 0;
        int len = 0;
        std::array<double, 4> v{};
    };

    CollocationMatrix() = default;
    CollocationMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void set_row(std::size_t j, int start, std::span<const double> vals) {
        if (vals.size() > 4) throw std::invalid_argument("CollocationMatrix: row span > 4");
        if (start < 0 || static_cast<std::size_t>(start) + vals.size() > cols_)
            throw std::invalid_argument("CollocationMatrix: row span out of bounds");
        Row& r = data_[j];
        r.start = start;
        r.len = static_cast<int>(vals.size());
        for (std::size_t t = 0; t < vals.size(); ++t) r.v[t] = vals[t];
    }

    const Row& row(std::size_t j) const { return data_[j]; }

    double entry(std::size_t j, std::size_t i) const {
        const Row& r = data_[j];
        const auto off = static_cast<long>(i) - r.start;
        if (off < 0 || off >= r.len) return 0.0;
        return r.v[static_cast<std::size_t>(off)];
    }

    /// y = A p (single channel).
    void apply(std::span<const double> p, std::span<double> y) const {
        if (p.size() != cols_ || y.size() != rows_)
            throw std::invalid_argument("CollocationMatrix::apply: dimension mismatch");
        for (std::size_t j = 0; j < rows_; ++j) {
            const Row& r = data_[j];
            double s = 0.0;
            for (int t = 0; t < r.len; ++t)
                s += r.v[static_cast<std::size_t>(t)] * p[static_cast<std::size_t>(r.start + t)];
            y[j] = s;
        }
    }

    /// g = A^T r (single channel).
    void apply_transpose(std::span<const double> r, std::span<double> g) const {
        if (r.size() != rows_ || g.size() != cols_)
            throw std::invalid_argument("CollocationMatrix::apply_transpose: dimension mismatch");
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t j = 0; j < rows_; ++j) {
            const Row& row = data_[j];
            for (int t = 0; t < row.len; ++t)
                g[static_cast<std::size_t>(row.start + t)] +=
                    row.v[static_cast<std::size_t>(t)] * r[j];
        }
    }

    /// Column sums of the matrix (support mass of each basis function).
    std::vector<double> column_sums() const {
        std::vector<double> s(cols_, 0.0);
        for (std::size_t j = 0; j < rows_; ++j) {
            const Row& r = data_[j];
            for (int t = 0; t < r.len; ++t)
                s[static_cast<std::size_t>(r.start + t)] += r.v[static_cast<std::size_t>(t)];
        }
        return s;
    }

    std::vector<std::vector<double>> to_dense() const {
        std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
        for (std::size_t j = 0; j < rows_; ++j) {
            const Row& r = data_[j];
            for (int t = 0; t < r.len; ++t)
                d[j][static_cast<std::size_t>(r.start + t)] = r.v[static_cast<std::size_t>(t)];
        }
        return d;
    }

    /// Build from a dense matrix whose rows have at most 4 contiguous
    /// nonzeros (test helper and tiny-oracle constructor).
    static CollocationMatrix from_dense(const std::vector<std::vector<double>>& d) {
        if (d.empty()) throw std::invalid_argument("from_dense: empty matrix");
        CollocationMatrix a(d.size(), d[0].size());
        for (std::size_t j = 0; j < d.size(); ++j) {
            int first = -1, last = -1;
            for (std::size_t i = 0; i < d[j].size(); ++i) {
                if (d[j][i] != 0.0) {
                    if (first < 0) first = static_cast<int>(i);
                    last = static_cast<int>(i);
                }
            }
            if (first < 0) continue;  // all-zero row
            const int len = last - first + 1;
            if (len > 4) throw std::invalid_argument("from_dense: row span > 4");
            std::array<double, 4> vals{};
            for (int t = 0; t < len; ++t) vals[static_cast<std::size_t>(t)] = d[j][static_cast<std::size_t>(first + t)];
            a.set_row(j, first, std::span<const double>(vals.data(), static_cast<std::size_t>(len)));
        }
        return a;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Row> data_;
};

/// Collocation matrix A[j][i] = mu_i(x_j) in sparse row form. Each row sums
/// to 1 (partition of unity); this is verified to 1e-12.
inline CollocationMatrix assemble_collocation(const KnotVector& kv, const ParamSequence& params) {
    const std::size_t m1 = params.size();
    const int n1 = kv.basis_count();
    CollocationMatrix a(m1, static_cast<std::size_t>(n1));
    std::array<double, 4> vals{};
    for (std::size_t j = 0; j < m1; ++j) {
        const double x = params[j];
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("assemble_collocation: parameter outside [0,1]");
        const int span = detail::find_span(kv, x);
        detail::basis_values_on_span(kv, span, x, vals);
        double sum = 0.0;
        for (int t = 0; t <= kv.degree; ++t) sum += vals[static_cast<std::size_t>(t)];
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::runtime_error("assemble_collocation: partition of unity violated");
        a.set_row(j, span - kv.degree,
                  std::span<const double>(vals.data(), static_cast<std::size_t>(kv.degree + 1)));
    }
    return a;
}

namespace detail {
inline std::size_t sample_index(std::size_t m, int n, int i) {
    // floor((m+1) i / n), clamped to m
    const auto idx = (m + 1) * static_cast<std::size_t>(i) / static_cast<std::size_t>(n);
    return std::min(idx, m);
}
}  // namespace detail

/// Initial control points for a curve: endpoints plus the data points at
/// indices floor((m+1) i / n), i = 1..n-1.
inline PointSet initial_controls_curve(const PointSet& pts, int n) {
    const std::size_t m = pts.size() - 1;
    if (n < 2 || m < static_cast<std::size_t>(n))
        throw std::invalid_argument("initial_controls_curve: requires m >= n >= 2");
    PointSet ctrl(pts.dim, static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        std::size_t idx;
        if (i == 0)
            idx = 0;
        else if (i == n)
            idx = m;
        else
            idx = detail::sample_index(m, n, i);
        for (int c = 0; c < pts.dim; ++c)
            ctrl.coord(c, static_cast<std::size_t>(i)) = pts.coord(c, idx);
    }
    return ctrl;
}

/// Initial control grid for a surface: P_ij = Q_{f1(i), f2(j)} with
/// f(0) = 0, f(n) = last index, f(i) = floor((count) i / n) otherwise.
inline PointGrid initial_controls_surface(const PointGrid& grid, int n) {
    const std::size_t m = grid.rows - 1;
    const std::size_t p = grid.cols - 1;
    if (n < 2 || m < static_cast<std::size_t>(n) || p < static_cast<std::size_t>(n))
        throw std::invalid_argument("initial_controls_surface: requires m, p >= n >= 2");
    PointGrid ctrl(grid.dim, static_cast<std::size_t>(n) + 1, static_cast<std::size_t>(n) + 1);
    auto f = [n](std::size_t count_minus1, int i) -> std::size_t {
        if (i == 0) return 0;
        if (i == n) return count_minus1;
        return detail::sample_index(count_minus1, n, i);
    };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int c = 0; c < grid.dim; ++c)
                ctrl.at(c, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    grid.at(c, f(m, i), f(p, j));
    return ctrl;
}

/// Inclusive range of removed original sample indices.
struct HoleRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t count() const { return last - first + 1; }
};

/// Rebuild a full-length parameter sequence from the parameters of the
/// surviving points plus the hole ranges: surviving points keep their
/// values, removed indices get parameters spaced uniformly across the gap.
/// The result drives knot construction so that the knot layout matches the
/// pre-deletion sample, which is what makes basis functions lose support
/// inside a hole.
inline ParamSequence fill_masked_params(const ParamSequence& remaining,
                                        const std::vector<HoleRange>& holes,
                                        std::size_t m_original) {
    std::size_t removed = 0;
    for (const auto& h : holes) {
        if (h.last < h.first) throw std::invalid_argument("fill_masked_params: bad hole range");
        if (h.first == 0 || h.last >= m_original)
            throw std::invalid_argument("fill_masked_params: hole must be strictly interior");
        removed += h.count();
    }
    if (remaining.size() + removed != m_original + 1)
        throw std::invalid_argument("fill_masked_params: counts do not add up");
    for (std::size_t t = 1; t < holes.size(); ++t)
        if (holes[t].first <= holes[t - 1].last + 1)
            throw std::invalid_argument("fill_masked_params: holes must be sorted and disjoint");

    std::vector<double> full(m_original + 1, -1.0);
    std::size_t r = 0;
    std::size_t hole_idx = 0;
    for (std::size_t o = 0; o <= m_original; ++o) {
        if (hole_idx < holes.size() && o >= holes[hole_idx].first && o <= holes[hole_idx].last) {
            if (o == holes[hole_idx].last) ++hole_idx;
            continue;
        }
        full[o] = remaining[r++];
    }
    for (const auto& h : holes) {
        const double left = full[h.first - 1];
        const double right = full[h.last + 1];
        const auto gap = static_cast<double>(h.count()) + 1.0;
        for (std::size_t t = 0; t < h.count(); ++t)
            full[h.first + t] = left + (right - left) * (static_cast<double>(t) + 1.0) / gap;
    }
    return ParamSequence::checked(std::move(full));
}

}  // namespace alspia

#endif  // ALSPIA_BSPLINE_HPP_

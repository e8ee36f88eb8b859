#ifndef ALSPIA_DATASETS_HPP_
#define ALSPIA_DATASETS_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alspia/bspline.hpp"
#include "alspia/geometry.hpp"
#include "alspia/linops.hpp"

namespace alspia {

/// One of the six test geometries, sampled uniformly in parameter with
/// endpoints included, plus an optional set of removed index ranges
/// (holes) for the rank-deficient fitting experiments.
struct SampledGeometry {
    int example_id = 1;
    bool surface = false;
    PointSet points;             // curve samples (full, before masking)
    PointGrid grid;              // surface samples
    std::vector<HoleRange> mask; // curve only

    /// Samples that survive the mask, in their original order.
    PointSet remaining_points() const {
        if (mask.empty()) return points;
        PointSet out(points.dim, 0);
        std::size_t hole = 0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (hole < mask.size() && j >= mask[hole].first && j <= mask[hole].last) {
                if (j == mask[hole].last) ++hole;
                continue;
            }
            out.push_back(points.coord(0, j), points.coord(1, j),
                          points.dim == 3 ? points.coord(2, j) : 0.0);
        }
        return out;
    }

    std::size_t masked_count() const {
        std::size_t c = 0;
        for (const auto& h : mask) c += h.count();
        return c;
    }
};

namespace detail {

inline bool curve_example(int id) { return id >= 1 && id <= 4; }
inline bool surface_example(int id) { return id == 5 || id == 6; }

inline double peaks(double t1, double t2) {
    const double a = 3.0 * (1.0 - t1) * (1.0 - t1) * std::exp(-t1 * t1 - (t2 + 1.0) * (t2 + 1.0));
    const double b = 10.0 * (t1 / 5.0 - t1 * t1 * t1 - std::pow(t2, 5)) * std::exp(-t1 * t1 - t2 * t2);
    const double c = (1.0 / 3.0) * std::exp(-(t1 + 1.0) * (t1 + 1.0) - t2 * t2);
    return a - b - c;
}

}  // namespace detail

/// Sample example `id` (1-4 curves, 5-6 surfaces) with m+1 points per
/// parameter direction (and p+1 in the second direction for surfaces).
/// Masks are recorded as removed index ranges; generation itself is not
/// re-sampled, so a masked geometry equals the unmasked one minus the
/// listed indices.
inline SampledGeometry gen_example(int id, std::size_t m,
                                   std::optional<std::size_t> p = std::nullopt,
                                   std::vector<HoleRange> mask = {}) {
    using std::numbers::pi;
    if (m < 1) throw std::invalid_argument("gen_example: m must be >= 1");
    SampledGeometry g;
    g.example_id = id;

    if (detail::curve_example(id)) {
        if (p.has_value()) throw std::invalid_argument("gen_example: curve examples take no p");
        for (std::size_t t = 1; t < mask.size(); ++t)
            if (mask[t].first <= mask[t - 1].last)
                throw std::invalid_argument("gen_example: mask ranges must be sorted and disjoint");
        std::size_t removed = 0;
        for (const auto& h : mask) {
            if (h.last < h.first || h.last >= m || h.first == 0)
                throw std::invalid_argument("gen_example: mask range must be strictly interior");
            removed += h.count();
        }
        if (m + 1 - removed < 2)
            throw std::invalid_argument("gen_example: mask removes too many points");
        g.mask = std::move(mask);

        const int dim = (id == 2 || id == 4) ? 3 : 2;
        g.points = PointSet(dim, m + 1);
        for (std::size_t j = 0; j <= m; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(m);
            double x = 0, y = 0, z = 0;
            switch (id) {
                case 1: {  // blob-shaped polar curve
                    const double th = 2.0 * pi * t;
                    const double r =
                        2.0 + 4.0 * std::cos(2.0 * th + pi / 4.0) + std::cos(3.0 * th + pi / 4.0);
                    x = r * std::cos(th);
                    y = r * std::sin(th);
                    break;
                }
                case 2: {  // spherical cardioid
                    const double th = 4.0 * pi * t;
                    x = 2.0 * std::cos(th) - std::cos(3.0 * th);
                    y = 2.0 * std::sin(th) - std::sin(3.0 * th);
                    z = 2.0 * std::cos(th / 2.0);
                    break;
                }
                case 3: {  // oscillating graph
                    const double th = 2.0 * pi * t;
                    const double c = std::cos(th);
                    x = th;
                    y = (3.0 + th) * (3.0 + th) * std::sin(10.0 * th) * c * c /
                        ((th + 1.0) * (th + 1.0));
                    break;
                }
                case 4: {  // helix
                    const double th = 2.0 * pi * t;
                    x = 10.0 * std::cos(th * pi / 3.0);
                    y = 10.0 * std::sin(th * pi / 3.0);
                    z = th * pi / 3.0;
                    break;
                }
                default:
                    throw std::invalid_argument("gen_example: invalid example id");
            }
            g.points.coord(0, j) = x;
            g.points.coord(1, j) = y;
            if (dim == 3) g.points.coord(2, j) = z;
        }
        return g;
    }

    if (!detail::surface_example(id)) throw std::invalid_argument("gen_example: invalid example id");
    if (!mask.empty()) throw std::invalid_argument("gen_example: surface examples take no mask");
    const std::size_t pp = p.value_or(m);
    if (pp < 1) throw std::invalid_argument("gen_example: p must be >= 1");
    g.surface = true;
    g.grid = PointGrid(3, m + 1, pp + 1);
    for (std::size_t h = 0; h <= m; ++h) {
        for (std::size_t l = 0; l <= pp; ++l) {
            const double s = static_cast<double>(h) / static_cast<double>(m);
            const double t = static_cast<double>(l) / static_cast<double>(pp);
            double x = 0, y = 0, z = 0;
            if (id == 5) {  // lemniscate-profile surface
                const double t1 = pi * s;
                const double t2 = pi * t;
                const double w = std::sqrt(std::abs(std::sin(2.0 * t1)));
                x = w * std::cos(t1) * std::cos(t2);
                y = w * std::sin(t1) * std::cos(t2);
                const double tn = std::tan(t2);
                z = x * x - y * y + 2.0 * x * y * tn * tn;
            } else {  // peaks graph
                const double t1 = -3.0 + 6.0 * s;
                const double t2 = -4.0 + 8.0 * t;
                x = t1;
                y = t2;
                z = detail::peaks(t1, t2);
            }
            g.grid.at(0, h, l) = x;
            g.grid.at(1, h, l) = y;
            g.grid.at(2, h, l) = z;
        }
    }
    return g;
}

namespace detail {

inline HoleRange hole_at(double center_frac, double width_frac, std::size_t m) {
    const double dm = static_cast<double>(m);
    auto lo = static_cast<long>(std::lround((center_frac - width_frac / 2.0) * dm));
    auto hi = static_cast<long>(std::lround((center_frac + width_frac / 2.0) * dm));
    lo = std::max(1L, lo);
    hi = std::min(static_cast<long>(m) - 1, hi);
    if (hi < lo) hi = lo;
    return HoleRange{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

/// True when the masked geometry yields a collocation with at least one
/// structurally empty column under the standard hole pipeline (chord
/// parameters of the surviving points, knots from the hole-filled full
/// parameter sequence).
inline bool mask_induces_deficiency(int id, std::size_t m, int n,
                                    const std::vector<HoleRange>& mask) {
    const auto geo = gen_example(id, m, std::nullopt, mask);
    const auto remaining = geo.remaining_points();
    if (remaining.size() < static_cast<std::size_t>(n) + 1) return false;
    const auto params = chord_parameterize(remaining);
    const auto full = fill_masked_params(params, mask, m);
    const auto knots = build_knots(full, n);
    const auto a = assemble_collocation(knots, params);
    return NormalOperator::curve(a).has_empty_column();
}

}  // namespace detail

/// Deterministic hole placement for the rank-deficient experiments:
/// example 3 gets one hole over the central 4% of the parameter domain,
/// example 4 three holes at 20%, 50%, 80%, each 3% wide. Holes are widened
/// (up to 3 retries) until some cubic basis function loses all support;
/// failure to induce deficiency is reported.
inline std::vector<HoleRange> singular_mask(int id, std::size_t m, int n) {
    if (id != 3 && id != 4) throw std::invalid_argument("singular_mask: only examples 3 and 4");
    double widen = 1.0;
    for (int attempt = 0; attempt <= 3; ++attempt, widen *= 1.5) {
        std::vector<HoleRange> mask;
        if (id == 3) {
            mask.push_back(detail::hole_at(0.5, 0.04 * widen, m));
        } else {
            mask.push_back(detail::hole_at(0.2, 0.03 * widen, m));
            mask.push_back(detail::hole_at(0.5, 0.03 * widen, m));
            mask.push_back(detail::hole_at(0.8, 0.03 * widen, m));
        }
        bool overlapping = false;
        for (std::size_t t = 1; t < mask.size(); ++t)
            if (mask[t].first <= mask[t - 1].last) overlapping = true;
        if (overlapping) break;
        if (detail::mask_induces_deficiency(id, m, n, mask)) return mask;
    }
    throw std::runtime_error("singular_mask: failed to induce rank deficiency at (m=" +
                             std::to_string(m) + ", n=" + std::to_string(n) + ")");
}

}  // namespace alspia

#endif  // ALSPIA_DATASETS_HPP_

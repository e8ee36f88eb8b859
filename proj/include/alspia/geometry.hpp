#ifndef ALSPIA_GEOMETRY_HPP_
#define ALSPIA_GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace alspia {

/// Ordered set of 2D or 3D points stored channel-planar (one vector per
/// coordinate). Used for curve data, curve control points, and anything
/// else that is "a list of points".
struct PointSet {
    int dim = 2;
    std::array<std::vector<double>, 3> ch;

    PointSet() = default;
    PointSet(int dimension, std::size_t count) : dim(dimension) {
        if (dimension != 2 && dimension != 3)
            throw std::invalid_argument("PointSet: dim must be 2 or 3");
        for (int c = 0; c < dim; ++c) ch[c].assign(count, 0.0);
    }

    std::size_t size() const { return ch[0].size(); }

    void push_back(double x, double y, double z = 0.0) {
        ch[0].push_back(x);
        ch[1].push_back(y);
        if (dim == 3) ch[2].push_back(z);
    }

    double coord(int c, std::size_t i) const { return ch[c][i]; }
    double& coord(int c, std::size_t i) { return ch[c][i]; }

    double distance(std::size_t i, std::size_t j) const {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double d = ch[c][i] - ch[c][j];
            s += d * d;
        }
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (int c = 0; c < dim; ++c)
            for (double v : ch[c])
                if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Rectangular grid of points, (rows) x (cols), channel-planar with
/// column-major storage: entry (h, l) of channel c lives at ch[c][h + l*rows].
/// Rows index the first parameter direction, columns the second.
struct PointGrid {
    int dim = 3;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::array<std::vector<double>, 3> ch;

    PointGrid() = default;
    PointGrid(int dimension, std::size_t r, std::size_t c) : dim(dimension), rows(r), cols(c) {
        if (dimension != 2 && dimension != 3)
            throw std::invalid_argument("PointGrid: dim must be 2 or 3");
        for (int k = 0; k < dim; ++k) ch[k].assign(rows * cols, 0.0);
    }

    std::size_t count() const { return rows * cols; }

    double at(int c, std::size_t h, std::size_t l) const { return ch[c][h + l * rows]; }
    double& at(int c, std::size_t h, std::size_t l) { return ch[c][h + l * rows]; }

    double row_distance(std::size_t h1, std::size_t h2, std::size_t l) const {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double d = at(c, h1, l) - at(c, h2, l);
            s += d * d;
        }
        return std::sqrt(s);
    }

    double col_distance(std::size_t h, std::size_t l1, std::size_t l2) const {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double d = at(c, h, l1) - at(c, h, l2);
            s += d * d;
        }
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (int c = 0; c < dim; ++c)
            for (double v : ch[c])
                if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace alspia

#endif  // ALSPIA_GEOMETRY_HPP_

#ifndef NLC_FIELD_HPP
#define NLC_FIELD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace nlc {

/** Real samples of a periodic scalar on the grid, row-major with row = y. */
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    /// Samples f(x, y) at every node.
    template <std::invocable<double, double> F>
    static ScalarField sample(const GridSpec& g, F&& f)
    {
        ScalarField out(g);
        const int n = g.n();
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                out.values[static_cast<std::size_t>(j) * n + i] = f(g.x(i), g.y(j));
            }
        }
        return out;
    }

    double& operator()(int row, int col) { return values[static_cast<std::size_t>(row) * grid.n() + col]; }
    double operator()(int row, int col) const { return values[static_cast<std::size_t>(row) * grid.n() + col]; }

    std::size_t size() const { return values.size(); }

    bool all_finite() const
    {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const
    {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    /// Grid quadrature of the integral over the unit square (h^2 sum).
    double integral() const
    {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }

    double mean() const { return integral(); }

    ScalarField& operator+=(const ScalarField& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
        return *this;
    }
    ScalarField& operator*=(double a)
    {
        for (double& v : values) v *= a;
        return *this;
    }

    void check_same(const ScalarField& o) const
    {
        if (!(grid == o.grid)) throw std::invalid_argument("ScalarField: grid mismatch");
    }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline ScalarField operator*(ScalarField a, double s) { return a *= s; }

inline double max_abs_diff(const ScalarField& a, const ScalarField& b)
{
    a.check_same(b);
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

/** Two-component field; both components live on one grid. */
struct VectorField2 {
    std::array<ScalarField, 2> c;

    VectorField2() = default;
    explicit VectorField2(const GridSpec& g, double fx = 0.0, double fy = 0.0) : c{ScalarField(g, fx), ScalarField(g, fy)} {}
    VectorField2(ScalarField x, ScalarField y) : c{std::move(x), std::move(y)}
    {
        c[0].check_same(c[1]);
    }

    template <std::invocable<double, double> FX, std::invocable<double, double> FY>
    static VectorField2 sample(const GridSpec& g, FX&& fx, FY&& fy)
    {
        return {ScalarField::sample(g, fx), ScalarField::sample(g, fy)};
    }

    const GridSpec& grid() const { return c[0].grid; }
    ScalarField& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    const ScalarField& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    bool all_finite() const { return c[0].all_finite() && c[1].all_finite(); }
    double max_abs() const { return std::max(c[0].max_abs(), c[1].max_abs()); }

    /// Pointwise Euclidean magnitude maximum.
    double max_norm() const
    {
        double m = 0.0;
        for (std::size_t k = 0; k < c[0].size(); ++k) m = std::max(m, std::hypot(c[0].values[k], c[1].values[k]));
        return m;
    }

    VectorField2& operator+=(const VectorField2& o)
    {
        c[0] += o.c[0];
        c[1] += o.c[1];
        return *this;
    }
    VectorField2& operator-=(const VectorField2& o)
    {
        c[0] -= o.c[0];
        c[1] -= o.c[1];
        return *this;
    }
    VectorField2& operator*=(double a)
    {
        c[0] *= a;
        c[1] *= a;
        return *this;
    }
};

inline VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
inline VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
inline VectorField2 operator*(double s, VectorField2 a) { return a *= s; }
inline VectorField2 operator*(VectorField2 a, double s) { return a *= s; }

inline double max_abs_diff(const VectorField2& a, const VectorField2& b)
{
    return std::max(max_abs_diff(a[0], b[0]), max_abs_diff(a[1], b[1]));
}

/** 2x2 tensor field, entry (i, j) stored at e[2 i + j] with 0-based indices. */
struct TensorField2 {
    std::array<ScalarField, 4> e;

    TensorField2() = default;
    explicit TensorField2(const GridSpec& g) : e{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)} {}

    const GridSpec& grid() const { return e[0].grid; }
    ScalarField& operator()(int i, int j) { return e[static_cast<std::size_t>(2 * i + j)]; }
    const ScalarField& operator()(int i, int j) const { return e[static_cast<std::size_t>(2 * i + j)]; }

    TensorField2& operator+=(const TensorField2& o)
    {
        for (std::size_t k = 0; k < 4; ++k) e[k] += o.e[k];
        return *this;
    }
};

inline TensorField2 operator+(TensorField2 a, const TensorField2& b) { return a += b; }

} // namespace nlc

#endif // NLC_FIELD_HPP

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace kvge {

/// Samples of a function on the uniform grid t_i = i / (N - 1), i = 0..N-1,
/// read as the piecewise-linear interpolant of those samples.
class GridFunction {
public:
    /// Throws std::invalid_argument for fewer than two samples or any
    /// non-finite value.
    explicit GridFunction(std::vector<double> values);

    static GridFunction constant(std::size_t n, double value);
    static GridFunction sample(std::size_t n, const std::function<double(double)>& f);

    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(values_.size() - 1); }
    double node(std::size_t i) const noexcept { return static_cast<double>(i) * spacing(); }
    std::vector<double> nodes() const;

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Linear interpolation; `t` is clamped to [0, 1].
    double operator()(double t) const noexcept;
    /// Cubic Lagrange interpolation through the four nodes nearest to `t`
    /// (shifted inward at the ends), clamped to [0, 1]. Exact for cubics;
    /// needs at least four samples, otherwise falls back to linear.
    double cubic(double t) const noexcept;

    double sup_norm() const noexcept;
    /// Exact integral of the interpolant over [0, 1] (trapezoid sum).
    double integral() const noexcept;
    /// Exact minimum of the interpolant over [a, b] within [0, 1].
    double min_on(double a, double b) const;
    bool is_nonnegative() const noexcept;

    GridFunction scaled(double factor) const;

private:
    std::vector<double> values_;
};

}  // namespace kvge

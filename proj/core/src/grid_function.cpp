#include "kvge/grid_function.hpp"

#include <algorithm>
#include <cmath>

namespace kvge {

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("grid function needs at least two nodes");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("grid function has a non-finite sample");
    }
}

GridFunction GridFunction::constant(std::size_t n, double value) {
    return GridFunction(std::vector<double>(n, value));
}

GridFunction GridFunction::sample(std::size_t n, const std::function<double(double)>& f) {
    if (n < 2) throw std::invalid_argument("grid function needs at least two nodes");
    std::vector<double> v(n);
    const double h = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * h);
    return GridFunction(std::move(v));
}

std::vector<double> GridFunction::nodes() const {
    std::vector<double> t(values_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = node(i);
    return t;
}

double GridFunction::operator()(double t) const noexcept {
    const std::size_t last = values_.size() - 1;
    if (t <= 0.0) return values_.front();
    if (t >= 1.0) return values_.back();
    const double x = t * static_cast<double>(last);
    const std::size_t i = std::min(static_cast<std::size_t>(x), last - 1);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double GridFunction::cubic(double t) const noexcept {
    const std::size_t n = values_.size();
    if (n < 4) return (*this)(t);
    t = std::clamp(t, 0.0, 1.0);
    const double x = t * static_cast<double>(n - 1);
    const std::size_t cell = std::min(static_cast<std::size_t>(x), n - 2);
    const std::size_t first = std::clamp<std::size_t>(cell == 0 ? 0 : cell - 1, 0, n - 4);
    double sum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        double w = 1.0;
        const double xj = static_cast<double>(first + j);
        for (std::size_t k = 0; k < 4; ++k) {
            if (k != j) w *= (x - static_cast<double>(first + k)) / (xj - static_cast<double>(first + k));
        }
        sum += w * values_[first + j];
    }
    return sum;
}

double GridFunction::sup_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::integral() const noexcept {
    double s = 0.5 * (values_.front() + values_.back());
    for (std::size_t i = 1; i + 1 < values_.size(); ++i) s += values_[i];
    return s * spacing();
}

double GridFunction::min_on(double a, double b) const {
    if (a > b) throw std::invalid_argument("min_on: empty interval");
    a = std::clamp(a, 0.0, 1.0);
    b = std::clamp(b, 0.0, 1.0);
    // A piecewise-linear function attains its minimum at an interval end or a node.
    double m = std::min((*this)(a), (*this)(b));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double t = node(i);
        if (t > a && t < b) m = std::min(m, values_[i]);
    }
    return m;
}

bool GridFunction::is_nonnegative() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

GridFunction GridFunction::scaled(double factor) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= factor;
    return GridFunction(std::move(v));
}

}  // namespace kvge

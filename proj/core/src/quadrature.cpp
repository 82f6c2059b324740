#include "kvge/quadrature.hpp"

#include <algorithm>
#include <numbers>

namespace kvge::quad {

namespace {

GaussRule build_rule() {
    GaussRule rule;
    constexpr int n = GaussRule::kPoints;
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre_16() {
    static const GaussRule rule = build_rule();
    return rule;
}

std::vector<double> uniform_mesh(int panels, double a, double b) {
    std::vector<double> mesh(static_cast<std::size_t>(panels) + 1);
    for (int k = 0; k <= panels; ++k) mesh[static_cast<std::size_t>(k)] = a + (b - a) * k / panels;
    mesh.back() = b;
    return mesh;
}

std::vector<double> graded_mesh(int panels, double a, double b, double exponent) {
    std::vector<double> mesh(static_cast<std::size_t>(panels) + 1);
    for (int k = 0; k <= panels; ++k) {
        mesh[static_cast<std::size_t>(k)] =
            a + (b - a) * std::pow(static_cast<double>(k) / panels, exponent);
    }
    mesh.back() = b;
    return mesh;
}

std::vector<double> two_sided_graded_mesh(int panels, double exponent) {
    const int half = std::max(1, panels / 2);
    std::vector<double> left = graded_mesh(half, 0.0, 0.5, exponent);
    std::vector<double> mesh = left;
    for (int k = half - 1; k >= 0; --k) mesh.push_back(1.0 - left[static_cast<std::size_t>(k)]);
    return mesh;
}

std::vector<double> merge_breakpoints(std::span<const double> mesh, std::span<const double> breakpoints) {
    if (mesh.size() < 2) return {mesh.begin(), mesh.end()};
    const double lo = mesh.front();
    const double hi = mesh.back();
    std::vector<double> all(mesh.begin(), mesh.end());
    for (double b : breakpoints) {
        if (b > lo && b < hi) all.push_back(b);
    }
    std::sort(all.begin(), all.end());
    const double eps = 1e-14 * std::max(1.0, hi - lo);
    std::vector<double> merged;
    merged.reserve(all.size());
    for (double x : all) {
        if (merged.empty() || x - merged.back() > eps) merged.push_back(x);
    }
    merged.back() = hi;
    return merged;
}

}  // namespace kvge::quad

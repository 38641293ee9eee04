#include "pdarcy/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pdarcy {

namespace {

GaussRule compute_rule(int order)
{
    // Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        rule.weights[i] = 2.0 * v * v;
    }
    return rule;
}

std::mutex cache_mutex;

}  // namespace

const GaussRule& gauss_legendre(int order)
{
    if (order < 1 || order > 64) {
        throw std::invalid_argument("gauss_legendre: order must be in [1, 64], got " +
                                    std::to_string(order));
    }
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_rule(order)).first;
    }
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int order, int panels)
{
    if (panels < 1) {
        throw std::invalid_argument("integrate: panels must be positive");
    }
    if (a == b) {
        return 0.0;
    }
    const GaussRule& rule = gauss_legendre(order);
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double panel = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            panel += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
        }
        sum += 0.5 * h * panel;
    }
    return sum;
}

double integrate_piecewise(const std::function<double(double)>& f, std::span<const double> breaks,
                           int order, int panels)
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        sum += integrate(f, breaks[i], breaks[i + 1], order, panels);
    }
    return sum;
}

const std::vector<TrianglePoint>& triangle_rule(int order)
{
    static std::map<int, std::vector<TrianglePoint>> cache;
    const GaussRule& g = gauss_legendre(order);
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(order);
    if (it != cache.end()) {
        return it->second;
    }
    std::vector<TrianglePoint> pts;
    pts.reserve(g.nodes.size() * g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double u = 0.5 * (g.nodes[i] + 1.0);
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            const double v = 0.5 * (g.nodes[j] + 1.0);
            // (u, v) in the unit square -> (u, (1 - u) v) in the triangle
            pts.push_back({u, (1.0 - u) * v, 0.25 * g.weights[i] * g.weights[j] * (1.0 - u)});
        }
    }
    return cache.emplace(order, std::move(pts)).first->second;
}

double integrate_triangle(const std::function<double(double, double)>& f,
                          const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                          const std::array<double, 2>& p2, int order)
{
    const double ax = p1[0] - p0[0], ay = p1[1] - p0[1];
    const double bx = p2[0] - p0[0], by = p2[1] - p0[1];
    const double jac = std::abs(ax * by - ay * bx);
    double sum = 0.0;
    for (const auto& q : triangle_rule(order)) {
        sum += q.weight * f(p0[0] + q.xi * ax + q.eta * bx, p0[1] + q.xi * ay + q.eta * by);
    }
    return jac * sum;
}

}  // namespace pdarcy

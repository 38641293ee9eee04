#pragma once

#include "pdarcy/field1d.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace pdarcy::testing {

/// Random continuous piecewise polynomial on [-1, 1] with r(-1) = 0.
///
/// The derivative is a random cubic on each piece and the value is its exact
/// antiderivative accumulated from -1, so the field is continuous with a
/// known piecewise-polynomial derivative.
inline PiecewiseField1D random_piecewise_polynomial(std::mt19937_64& rng, std::vector<double> extra_breaks = {})
{
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> where(-0.95, 0.95);
    std::uniform_int_distribution<int> count(1, 4);

    std::vector<double> breaks = {-1.0, 1.0};
    for (int i = count(rng); i > 0; --i) {
        breaks.push_back(where(rng));
    }
    breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return b - a < 1e-6; }),
                 breaks.end());
    breaks.back() = 1.0;

    std::vector<PiecewiseField1D::Piece> pieces;
    double start_value = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i];
        const double hi = breaks[i + 1];
        const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
        auto deriv = [=](double x) {
            const double t = x - lo;
            return c0 + t * (c1 + t * (c2 + t * c3));
        };
        auto value = [=](double x) {
            const double t = x - lo;
            return start_value + t * (c0 + t * (c1 / 2.0 + t * (c2 / 3.0 + t * c3 / 4.0)));
        };
        pieces.push_back({lo, hi, value, deriv});
        start_value = value(hi);
    }
    return PiecewiseField1D(std::move(pieces), "random");
}

}  // namespace pdarcy::testing

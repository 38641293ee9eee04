#include "pdarcy/field1d.hpp"

#include "pdarcy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdarcy {

PiecewiseField1D::PiecewiseField1D(std::vector<Piece> pieces, std::string origin)
    : pieces_(std::move(pieces)), origin_(std::move(origin))
{
    if (pieces_.empty()) {
        throw std::invalid_argument("PiecewiseField1D needs at least one piece");
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (!(pieces_[i].lo < pieces_[i].hi)) {
            throw std::invalid_argument("PiecewiseField1D: empty piece");
        }
        if (i > 0 && std::abs(pieces_[i].lo - pieces_[i - 1].hi) > 1e-14) {
            throw std::invalid_argument("PiecewiseField1D: pieces are not contiguous");
        }
    }
}

PiecewiseField1D PiecewiseField1D::zero(std::string origin)
{
    auto z = [](double) { return 0.0; };
    return PiecewiseField1D({{-1.0, 1.0, z, z}}, std::move(origin));
}

std::size_t PiecewiseField1D::piece_index(double x) const
{
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double t, const Piece& p) { return t < p.hi; });
    if (it == pieces_.end()) {
        return pieces_.size() - 1;
    }
    return static_cast<std::size_t>(it - pieces_.begin());
}

double PiecewiseField1D::value(double x) const { return pieces_[piece_index(x)].value(x); }

double PiecewiseField1D::derivative(double x) const { return pieces_[piece_index(x)].derivative(x); }

std::vector<double> PiecewiseField1D::breakpoints() const
{
    std::vector<double> b;
    b.reserve(pieces_.size() + 1);
    b.push_back(pieces_.front().lo);
    for (const auto& p : pieces_) {
        b.push_back(p.hi);
    }
    return b;
}

double PiecewiseField1D::max_jump() const
{
    double jump = 0.0;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        const double x = pieces_[i].hi;
        jump = std::max(jump, std::abs(pieces_[i].value(x) - pieces_[i + 1].value(x)));
    }
    return jump;
}

std::vector<double> merged_breakpoints(const PiecewiseField1D& a, const PiecewiseField1D& b)
{
    auto pa = a.breakpoints();
    auto pb = b.breakpoints();
    std::vector<double> all;
    std::merge(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(all));
    all.erase(std::unique(all.begin(), all.end(), [](double u, double v) { return v - u < 1e-14; }), all.end());
    return all;
}

PiecewiseField1D combine(const PiecewiseField1D& a, double ca, const PiecewiseField1D& b, double cb,
                         std::string origin)
{
    const auto breaks = merged_breakpoints(a, b);
    std::vector<PiecewiseField1D::Piece> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        // bind the pieces that cover this interval so breakpoint evaluation stays one-sided
        const auto& pa = a.pieces()[a.piece_index(mid)];
        const auto& pb = b.pieces()[b.piece_index(mid)];
        pieces.push_back({breaks[i], breaks[i + 1],
                          [va = pa.value, vb = pb.value, ca, cb](double x) { return ca * va(x) + cb * vb(x); },
                          [da = pa.derivative, db = pb.derivative, ca, cb](double x) {
                              return ca * da(x) + cb * db(x);
                          }});
    }
    return PiecewiseField1D(std::move(pieces), std::move(origin));
}

double vinner_1d(const PiecewiseField1D& a, const PiecewiseField1D& b, int order, int panels)
{
    const auto breaks = merged_breakpoints(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const auto& da = a.pieces()[a.piece_index(mid)].derivative;
        const auto& db = b.pieces()[b.piece_index(mid)].derivative;
        sum += integrate([&](double x) { return da(x) * db(x); }, breaks[i], breaks[i + 1], order, panels);
    }
    return sum;
}

double vnorm_diff_1d(const PiecewiseField1D& a, const PiecewiseField1D& b, int order, int panels)
{
    const auto breaks = merged_breakpoints(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const auto& da = a.pieces()[a.piece_index(mid)].derivative;
        const auto& db = b.pieces()[b.piece_index(mid)].derivative;
        sum += integrate(
            [&](double x) {
                const double d = da(x) - db(x);
                return d * d;
            },
            breaks[i], breaks[i + 1], order, panels);
    }
    return std::sqrt(sum);
}

double vnorm_1d(const PiecewiseField1D& a, int order, int panels)
{
    return vnorm_diff_1d(a, PiecewiseField1D::zero(), order, panels);
}

}  // namespace pdarcy

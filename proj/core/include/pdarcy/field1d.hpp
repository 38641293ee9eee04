#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pdarcy {

/// Scalar field on [-1, 1] given piece by piece by value and derivative callables.
///
/// Pieces are contiguous and ordered. At an interior breakpoint, value() and
/// derivative() use the piece to the right.
class PiecewiseField1D {
public:
    using Function = std::function<double(double)>;

    struct Piece {
        double lo;
        double hi;
        Function value;
        Function derivative;
    };

    PiecewiseField1D() = default;
    PiecewiseField1D(std::vector<Piece> pieces, std::string origin);

    static PiecewiseField1D zero(std::string origin = "zero");

    double value(double x) const;
    double derivative(double x) const;
    std::size_t piece_index(double x) const;

    /// All piece endpoints, from -1 to 1.
    std::vector<double> breakpoints() const;
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::string& origin() const { return origin_; }

    /// Largest |value jump| across interior breakpoints.
    double max_jump() const;

private:
    std::vector<Piece> pieces_;
    std::string origin_;
};

/// ca * a + cb * b on the merged breakpoints.
PiecewiseField1D combine(const PiecewiseField1D& a, double ca, const PiecewiseField1D& b, double cb,
                         std::string origin = "combination");

/// Sorted union of both breakpoint sets.
std::vector<double> merged_breakpoints(const PiecewiseField1D& a, const PiecewiseField1D& b);

/// V-norm of the difference: square root of the integral of (a' - b')^2 over (-1, 1).
double vnorm_diff_1d(const PiecewiseField1D& a, const PiecewiseField1D& b, int order = 8, int panels = 4);

double vnorm_1d(const PiecewiseField1D& a, int order = 8, int panels = 4);

/// V inner product: integral of a' b'.
double vinner_1d(const PiecewiseField1D& a, const PiecewiseField1D& b, int order = 8, int panels = 4);

}  // namespace pdarcy

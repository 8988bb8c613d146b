#pragma once

#include <cmath>
#include <functional>

namespace smpr_test {

// Adaptive Simpson quadrature; the independent integration oracle for the
// derived expected values in these suites.
inline double simpson_segment(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double tol,
                                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_segment(a, m, fa, flm, fm);
    const double right = simpson_segment(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    // floor the per-cell tolerance near machine precision so kinks cannot
    // force a full-depth binary recursion
    tol = std::max(tol, 1e-14);
    // eleven uneven initial segments; a symmetric integrand on a symmetric
    // window can otherwise fool the refinement criterion at the first step
    constexpr int kSegments = 11;
    double total = 0.0;
    double left = a;
    for (int s = 1; s <= kSegments; ++s) {
        const double right = s == kSegments ? b : a + (b - a) * s / static_cast<double>(kSegments);
        const double fa_ = f(left), fb_ = f(right), fm_ = f(0.5 * (left + right));
        const double whole = simpson_segment(left, right, fa_, fm_, fb_);
        total += adaptive_simpson_impl(f, left, right, fa_, fm_, fb_, whole, tol / kSegments, 24);
        left = right;
    }
    return total;
}

/// Scale-aware wrapper: relative tolerance against the integral's magnitude.
inline double integrate_rel(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = 1e-12) {
    const double rough = integrate(f, a, b, 1e-10);
    return integrate(f, a, b, rel_tol * std::max(1.0, std::abs(rough)));
}

}  // namespace smpr_test

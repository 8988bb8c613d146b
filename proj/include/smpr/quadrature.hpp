#pragma once

#include <vector>

#include "smpr/orthopoly.hpp"

namespace smpr {

/// Gauss rule for integration against a marginal measure: sum_i w_i f(x_i)
/// approximates (and for polynomials of degree <= 2n-1 equals) E f(X).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    double integrate(const std::vector<double>& values) const;

    template <typename F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

/// Golub-Welsch rule with n nodes built from the basis recurrence coefficients.
GaussRule gauss_rule(const OrthoBasis& basis, int n);

/// Convenience: derives the recurrence first.
GaussRule gauss_rule(const MarginalSpec& spec, int n);

}  // namespace smpr

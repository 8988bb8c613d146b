#pragma once

#include "smpr/errors.hpp"

namespace smpr {

/// Nome and phase of the Jacobi theta function theta(q; a).
struct ThetaParams {
    double q;      // nome, 0 <= q < 1
    double alpha;  // phase in radians
};

/// Modified Bessel function of the first kind by its power series
/// sum_m (z/2)^{2m+nu} / (m! Gamma(m+nu+1)), terminated when a term drops
/// below 1e-18 of the partial sum. Arguments above kBesselArgCap overflow
/// double and are rejected; kernels use log_bessel_i beyond that.
double bessel_i(double nu, double z);
constexpr double kBesselArgCap = 600.0;

/// log I_nu(z) valid for large z (series below 30, uniform asymptotics above).
double log_bessel_i(double nu, double z);

/// theta(q; a) = 1 + 2 sum_j q^{j^2} cos(2 j a); positive for q in [0, 1).
double jacobi_theta(const ThetaParams& p);

/// Same function through the triple product
/// prod_m (1 - q^{2m})(1 + 2 cos(2a) q^{2m-1} + q^{4m-2}).
double theta_triple_product(const ThetaParams& p);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Inverse of P(a, .) by bracketing bisection; used for tail truncation.
double gamma_quantile(double a, double p);

}  // namespace smpr

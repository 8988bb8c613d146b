#include "smpr/special_functions.hpp"

#include <cmath>
#include <string>

namespace smpr {

double bessel_i(double nu, double z) {
    if (z < 0.0) throw validation_error("bessel_i requires z >= 0");
    if (nu <= -1.0) throw validation_error("bessel_i requires nu > -1");
    if (z > kBesselArgCap)
        throw numeric_error("bessel_i argument " + std::to_string(z) + " exceeds cap " +
                                std::to_string(kBesselArgCap) + "; use log_bessel_i",
                            z);
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;

    const double half = 0.5 * z;
    double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
    double sum = term;
    for (int m = 1; m < 10000; ++m) {
        term *= half * half / (m * (m + nu));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

double log_bessel_i(double nu, double z) {
    if (z < 0.0) throw validation_error("log_bessel_i requires z >= 0");
    if (z <= 30.0) {
        const double v = bessel_i(nu, z);
        if (v <= 0.0) throw numeric_error("log_bessel_i underflow", z);
        return std::log(v);
    }
    // Uniform large-argument expansion:
    // I_nu(z) ~ e^z / sqrt(2 pi z) * (1 - (mu-1)/(8z) + (mu-1)(mu-9)/(2!(8z)^2) - ...),
    // mu = 4 nu^2.
    const double mu = 4.0 * nu * nu;
    double term = 1.0, series = 1.0;
    for (int k = 1; k <= 16; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * z * k);
        series += term;
        if (std::abs(term) < 1e-16 * std::abs(series)) break;
    }
    return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(series);
}

double jacobi_theta(const ThetaParams& p) {
    if (p.q < 0.0 || p.q >= 1.0)
        throw validation_error("theta nome must lie in [0, 1)");
    double sum = 1.0;
    double qj = 1.0;
    for (int j = 1; j < 100000; ++j) {
        // q^{j^2} = q^{(j-1)^2} * q^{2j-1}
        qj *= std::pow(p.q, 2 * j - 1);
        if (qj < 1e-18) break;
        sum += 2.0 * qj * std::cos(2.0 * j * p.alpha);
    }
    return sum;
}

double theta_triple_product(const ThetaParams& p) {
    if (p.q < 0.0 || p.q >= 1.0)
        throw validation_error("theta nome must lie in [0, 1)");
    if (p.q == 0.0) return 1.0;
    const double c = 2.0 * std::cos(2.0 * p.alpha);
    double prod = 1.0;
    double q2m = 1.0;         // q^{2m}
    double q2m1 = 1.0 / p.q;  // q^{2m-1}, advanced before use
    for (int m = 1; m < 100000; ++m) {
        q2m *= p.q * p.q;
        q2m1 *= p.q * p.q;
        prod *= (1.0 - q2m) * (1.0 + c * q2m1 + q2m1 * q2m1);
        if (q2m + q2m1 * (2.0 + q2m1) < 1e-17) break;
    }
    return prod;
}

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw validation_error("incomplete gamma requires a > 0");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) {
        // series representation
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (term < 1e-16 * sum) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q(a, x) by modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

double gamma_quantile(double a, double p) {
    if (p <= 0.0 || p >= 1.0) throw validation_error("quantile level must lie in (0, 1)");
    double lo = 0.0;
    double hi = a + 10.0;
    while (regularized_gamma_p(a, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_gamma_p(a, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace smpr

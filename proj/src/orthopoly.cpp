#include "smpr/orthopoly.hpp"

#include <cmath>

namespace smpr {

Rational ExactLDL::coeff_product(int j, int jp, int n) const {
    if (n > j || n > jp) return 0;
    return rows[static_cast<size_t>(j)][static_cast<size_t>(n)] *
           rows[static_cast<size_t>(jp)][static_cast<size_t>(n)] * diag[static_cast<size_t>(n)];
}

ExactLDL exact_ldl(const MarginalSpec& spec, int order) {
    if (order < 0) throw validation_error("coefficient order must be >= 0");
    if (order > kMaxCoeffOrder)
        throw validation_error("coefficient order " + std::to_string(order) +
                               " exceeds supported maximum " + std::to_string(kMaxCoeffOrder));
    const auto m = exact_raw_moments(spec, 2 * order);

    ExactLDL f;
    f.order = order;
    f.rows.resize(static_cast<size_t>(order) + 1);
    f.diag.resize(static_cast<size_t>(order) + 1);
    for (int j = 0; j <= order; ++j) {
        auto& row = f.rows[static_cast<size_t>(j)];
        row.resize(static_cast<size_t>(j) + 1);
        for (int n = 0; n < j; ++n) {
            Rational sum = m[static_cast<size_t>(j + n)];
            for (int k = 0; k < n; ++k)
                sum -= row[static_cast<size_t>(k)] * f.rows[static_cast<size_t>(n)][static_cast<size_t>(k)] *
                       f.diag[static_cast<size_t>(k)];
            row[static_cast<size_t>(n)] = sum / f.diag[static_cast<size_t>(n)];
        }
        Rational d = m[static_cast<size_t>(2 * j)];
        for (int k = 0; k < j; ++k)
            d -= row[static_cast<size_t>(k)] * row[static_cast<size_t>(k)] * f.diag[static_cast<size_t>(k)];
        if (d <= 0)
            throw numeric_error("moment matrix factorization breakdown at order " +
                                    std::to_string(j) + " for " + spec.describe(),
                                static_cast<double>(j));
        row[static_cast<size_t>(j)] = 1;
        f.diag[static_cast<size_t>(j)] = d;
    }
    return f;
}

CoeffMatrix::CoeffMatrix(int order, std::vector<double> lower,
                         std::shared_ptr<const ExactLDL> exact)
    : order_(order), lower_(std::move(lower)), exact_(std::move(exact)) {}

double CoeffMatrix::at(int j, int n) const {
    if (j < 0 || j > order_ || n < 0)
        throw validation_error("coefficient index out of range");
    if (n > j) return 0.0;
    return lower_[static_cast<size_t>(j) * (static_cast<size_t>(j) + 1) / 2 + static_cast<size_t>(n)];
}

CoeffMatrix basis_from_moments(const MarginalSpec& spec, int degree) {
    auto exact = std::make_shared<ExactLDL>(exact_ldl(spec, degree));
    std::vector<double> lower;
    lower.reserve(static_cast<size_t>(degree + 1) * static_cast<size_t>(degree + 2) / 2);
    std::vector<double> sqrt_d(static_cast<size_t>(degree) + 1);
    for (int n = 0; n <= degree; ++n)
        sqrt_d[static_cast<size_t>(n)] = std::sqrt(to_double(exact->diag[static_cast<size_t>(n)]));
    for (int j = 0; j <= degree; ++j)
        for (int n = 0; n <= j; ++n)
            lower.push_back(to_double(exact->rows[static_cast<size_t>(j)][static_cast<size_t>(n)]) *
                            sqrt_d[static_cast<size_t>(n)]);
    return CoeffMatrix(degree, std::move(lower), std::move(exact));
}

namespace {

/// Monic Jacobi coefficients (a, b) for the named families; count terms of
/// each. Throws for Laplace, which has no closed recurrence.
void family_jacobi(const MarginalSpec& spec, int count, std::vector<double>& a,
                   std::vector<double>& b) {
    a.assign(static_cast<size_t>(count) + 1, 0.0);
    b.assign(static_cast<size_t>(count) + 2, 0.0);
    switch (spec.family()) {
        case Family::Gaussian:
            for (int n = 1; n < count + 2; ++n) b[static_cast<size_t>(n)] = n;
            break;
        case Family::Gamma: {
            const double beta = spec.shape();
            for (int n = 0; n < count + 1; ++n) a[static_cast<size_t>(n)] = 2.0 * n + beta;
            for (int n = 1; n < count + 2; ++n) b[static_cast<size_t>(n)] = n * (n + beta - 1.0);
            break;
        }
        case Family::Arcsine:
            b[1] = 0.5;
            for (int n = 2; n < count + 2; ++n) b[static_cast<size_t>(n)] = 0.25;
            break;
        case Family::Semicircle: {
            const double r2 = spec.radius() * spec.radius();
            for (int n = 1; n < count + 2; ++n) b[static_cast<size_t>(n)] = 0.25 * r2;
            break;
        }
        case Family::QNormal: {
            const double q = spec.q();
            double qpow = 1.0, bracket = 0.0;
            for (int n = 1; n < count + 2; ++n) {
                bracket += qpow;
                qpow *= q;
                b[static_cast<size_t>(n)] = bracket;  // [n]_q
            }
            break;
        }
        case Family::Laplace:
            throw validation_error("laplace has no named recurrence; use the moment route");
    }
}

/// Jacobi coefficients recovered from the exact factorization:
/// b_n = D_n / D_{n-1} and a_n = L[n+1][n] - L[n][n-1], both rational.
void moment_jacobi(const MarginalSpec& spec, int degree, std::vector<double>& a,
                   std::vector<double>& b) {
    const int order = degree + 1;
    if (order > kMaxCoeffOrder)
        throw validation_error("moment-route basis degree " + std::to_string(degree) +
                               " exceeds supported maximum " + std::to_string(kMaxCoeffOrder - 1));
    const ExactLDL f = exact_ldl(spec, order);
    a.assign(static_cast<size_t>(degree) + 1, 0.0);
    b.assign(static_cast<size_t>(degree) + 2, 0.0);
    for (int n = 0; n <= degree; ++n) {
        Rational an = f.rows[static_cast<size_t>(n) + 1][static_cast<size_t>(n)];
        if (n > 0) an -= f.rows[static_cast<size_t>(n)][static_cast<size_t>(n) - 1];
        a[static_cast<size_t>(n)] = to_double(an);
    }
    for (int n = 1; n <= degree + 1; ++n)
        b[static_cast<size_t>(n)] =
            to_double(f.diag[static_cast<size_t>(n)] / f.diag[static_cast<size_t>(n) - 1]);
}

}  // namespace

OrthoBasis::OrthoBasis(MarginalSpec spec, int degree, std::vector<double> a,
                       std::vector<double> b, BasisRoute route)
    : spec_(std::make_shared<MarginalSpec>(spec)),
      degree_(degree),
      a_(std::move(a)),
      b_(std::move(b)),
      route_(route) {
    sqrt_b_.resize(b_.size());
    sqrt_b_[0] = 1.0;
    for (size_t i = 1; i < b_.size(); ++i) sqrt_b_[i] = std::sqrt(b_[i]);
}

double OrthoBasis::eval(int n, double x) const {
    if (n < 0 || n > degree_)
        throw validation_error("polynomial degree " + std::to_string(n) + " out of range [0, " +
                               std::to_string(degree_) + "]");
    double hm1 = 0.0, h = 1.0;
    for (int m = 0; m < n; ++m) {
        const double next =
            ((x - a_[static_cast<size_t>(m)]) * h - sqrt_b_[static_cast<size_t>(m)] * hm1) /
            sqrt_b_[static_cast<size_t>(m) + 1];
        hm1 = h;
        h = next;
    }
    return h;
}

void OrthoBasis::eval_all(int n, double x, std::vector<double>& out) const {
    out.resize(static_cast<size_t>(n) + 1);
    double hm1 = 0.0, h = 1.0;
    out[0] = 1.0;
    for (int m = 0; m < n; ++m) {
        const double next =
            ((x - a_[static_cast<size_t>(m)]) * h - sqrt_b_[static_cast<size_t>(m)] * hm1) /
            sqrt_b_[static_cast<size_t>(m) + 1];
        hm1 = h;
        h = next;
        out[static_cast<size_t>(m) + 1] = h;
    }
}

OrthoBasis basis_from_recurrence(const MarginalSpec& spec, int degree) {
    spec.validate();
    if (degree < 0) throw validation_error("basis degree must be >= 0");
    if (degree > kMaxBasisDegree)
        throw validation_error("basis degree exceeds maximum " + std::to_string(kMaxBasisDegree));
    std::vector<double> a, b;
    if (spec.family() == Family::Laplace) {
        moment_jacobi(spec, degree, a, b);
        return OrthoBasis(spec, degree, std::move(a), std::move(b), BasisRoute::Moments);
    }
    family_jacobi(spec, degree, a, b);
    return OrthoBasis(spec, degree, std::move(a), std::move(b), BasisRoute::Recurrence);
}

double eval_h(const OrthoBasis& basis, int n, double x) { return basis.eval(n, x); }

namespace {

double sqrt_factorial(int n) { return std::sqrt(to_double(Rational(factorial(n)))); }

}  // namespace

CoeffMatrix coeffs_from_expansion(const MarginalSpec& spec, int degree) {
    spec.validate();
    if (degree < 0 || degree > kMaxCoeffOrder)
        throw validation_error("expansion order out of range [0, " +
                               std::to_string(kMaxCoeffOrder) + "]");
    std::vector<double> lower;
    lower.reserve(static_cast<size_t>(degree + 1) * static_cast<size_t>(degree + 2) / 2);
    switch (spec.family()) {
        case Family::Gaussian:
            // x^j = j! sum_m h_{j-2m} / (2^m m! (j-2m)!) over monic Hermite,
            // so against orthonormal h_n: c_{j,n} = j! / (2^{(j-n)/2} ((j-n)/2)! sqrt(n!)).
            for (int j = 0; j <= degree; ++j)
                for (int n = 0; n <= j; ++n) {
                    if ((j - n) % 2 != 0) {
                        lower.push_back(0.0);
                        continue;
                    }
                    const int m = (j - n) / 2;
                    const Rational num(factorial(j), (BigInt(1) << m) * factorial(m));
                    lower.push_back(to_double(num) / sqrt_factorial(n));
                }
            break;
        case Family::Arcsine:
            // x^j = 2^{1-j} sum' binom(j, (j-n)/2) T_n with the n = 0 term halved;
            // h_n = sqrt(2) T_n for n >= 1.
            for (int j = 0; j <= degree; ++j)
                for (int n = 0; n <= j; ++n) {
                    if ((j - n) % 2 != 0) {
                        lower.push_back(0.0);
                        continue;
                    }
                    const Rational coeff(binomial(j, (j - n) / 2), BigInt(1) << j);
                    if (n == 0)
                        lower.push_back(to_double(coeff));
                    else
                        lower.push_back(to_double(2 * coeff) / std::sqrt(2.0));
                }
            break;
        case Family::Semicircle: {
            // x^j = 2^{-j} sum (binom(j,(j-n)/2) - binom(j,(j-n)/2 - 1)) U_n,
            // scaled by r^j for radius r; U_n are already orthonormal.
            const Rational r = exact(spec.radius());
            Rational rj = 1;
            for (int j = 0; j <= degree; ++j) {
                for (int n = 0; n <= j; ++n) {
                    if ((j - n) % 2 != 0) {
                        lower.push_back(0.0);
                        continue;
                    }
                    const int m = (j - n) / 2;
                    const Rational coeff(binomial(j, m) - binomial(j, m - 1), BigInt(1) << j);
                    lower.push_back(to_double(coeff * rj));
                }
                rj *= r;
            }
            break;
        }
        default:
            throw validation_error("no closed-form expansion table for " + spec.describe());
    }
    return CoeffMatrix(degree, std::move(lower), nullptr);
}

}  // namespace smpr

#include "smpr/marginals.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace smpr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Gamma: return "gamma";
        case Family::Laplace: return "laplace";
        case Family::Arcsine: return "arcsine";
        case Family::Semicircle: return "semicircle";
        case Family::QNormal: return "qnormal";
    }
    throw validation_error("unknown family enum value");
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::Gaussian;
    if (name == "gamma") return Family::Gamma;
    if (name == "laplace") return Family::Laplace;
    if (name == "arcsine") return Family::Arcsine;
    if (name == "semicircle") return Family::Semicircle;
    if (name == "qnormal") return Family::QNormal;
    throw validation_error("unknown family '" + name +
                           "' (expected gaussian|gamma|laplace|arcsine|semicircle|qnormal)");
}

bool Support::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

MarginalSpec MarginalSpec::gaussian() { return {Family::Gaussian, 0, 1, 0}; }
MarginalSpec MarginalSpec::gamma(double beta) { return {Family::Gamma, beta, 1, 0}; }
MarginalSpec MarginalSpec::laplace() { return {Family::Laplace, 0, 1, 0}; }
MarginalSpec MarginalSpec::arcsine() { return {Family::Arcsine, 0, 1, 0}; }
MarginalSpec MarginalSpec::semicircle(double radius) { return {Family::Semicircle, 0, radius, 0}; }
MarginalSpec MarginalSpec::q_normal(double q) { return {Family::QNormal, 0, 1, q}; }

Support MarginalSpec::support() const {
    switch (family_) {
        case Family::Gaussian:
        case Family::Laplace: return {-kInf, kInf};
        case Family::Gamma: return {0.0, kInf};
        case Family::Arcsine: return {-1.0, 1.0};
        case Family::Semicircle: return {-radius_, radius_};
        case Family::QNormal:
            if (q_ == 1.0) return {-kInf, kInf};
            return {-2.0 / std::sqrt(1.0 - q_), 2.0 / std::sqrt(1.0 - q_)};
    }
    throw validation_error("unknown family enum value");
}

std::string MarginalSpec::describe() const {
    switch (family_) {
        case Family::Gamma: return "gamma(beta=" + std::to_string(shape_) + ")";
        case Family::Semicircle: return "semicircle(r=" + std::to_string(radius_) + ")";
        case Family::QNormal: return "qnormal(q=" + std::to_string(q_) + ")";
        default: return family_name(family_);
    }
}

void MarginalSpec::validate() const {
    switch (family_) {
        case Family::Gamma:
            if (!(shape_ > 0.0) || !std::isfinite(shape_))
                throw validation_error("gamma shape beta must be > 0");
            break;
        case Family::Semicircle:
            if (!(radius_ > 0.0) || !std::isfinite(radius_))
                throw validation_error("semicircle radius must be > 0");
            break;
        case Family::QNormal:
            if (!(q_ > -1.0 && q_ <= 1.0))
                throw validation_error("qnormal q must lie in (-1, 1]");
            break;
        default: break;
    }
}

std::vector<Rational> moments_from_recurrence(const std::vector<Rational>& a,
                                              const std::vector<Rational>& b,
                                              int max_order) {
    std::vector<Rational> coeffs{1};  // x^j * p_0 written in the p-basis
    std::vector<Rational> moments{1};
    for (int j = 1; j <= max_order; ++j) {
        std::vector<Rational> next(static_cast<size_t>(j) + 1, Rational(0));
        for (size_t m = 0; m < coeffs.size(); ++m) {
            const Rational& c = coeffs[m];
            if (c == 0) continue;
            next[m + 1] += c;
            if (m < a.size()) next[m] += a[m] * c;
            if (m > 0) next[m - 1] += b.at(m) * c;
        }
        coeffs = std::move(next);
        moments.push_back(coeffs[0]);
    }
    return moments;
}

std::vector<Rational> exact_raw_moments(const MarginalSpec& spec, int max_order) {
    spec.validate();
    if (max_order < 0) throw validation_error("moment order must be >= 0");
    if (max_order > kMaxMomentOrder)
        throw validation_error("moment order " + std::to_string(max_order) +
                               " exceeds supported maximum " + std::to_string(kMaxMomentOrder));

    std::vector<Rational> m(static_cast<size_t>(max_order) + 1, Rational(0));
    m[0] = 1;
    switch (spec.family()) {
        case Family::Gaussian:
            for (int j = 2; j <= max_order; j += 2) m[j] = double_factorial(j - 1);
            break;
        case Family::Gamma: {
            const Rational beta = exact(spec.shape());
            for (int j = 1; j <= max_order; ++j) m[j] = raising_factorial(beta, j);
            break;
        }
        case Family::Laplace:
            for (int j = 2; j <= max_order; j += 2) m[j] = factorial(j);
            break;
        case Family::Arcsine:
            // EX^{2n} = binom(2n, n) / 4^n
            for (int j = 2; j <= max_order; j += 2)
                m[j] = Rational(binomial(j, j / 2), BigInt(1) << j);
            break;
        case Family::Semicircle: {
            // EX^{2n} = r^{2n} C_n / 4^n
            const Rational r2 = exact(spec.radius()) * exact(spec.radius());
            Rational r2n = 1;
            for (int j = 2; j <= max_order; j += 2) {
                r2n *= r2;
                m[j] = r2n * Rational(catalan(j / 2), BigInt(1) << j);
            }
            break;
        }
        case Family::QNormal: {
            // Moments follow from the q-Hermite recurrence H_{n+1} = x H_n - [n]_q H_{n-1}.
            const Rational q = exact(spec.q());
            std::vector<Rational> a(static_cast<size_t>(max_order), Rational(0));
            std::vector<Rational> b(static_cast<size_t>(max_order) + 1, Rational(0));
            Rational qpow = 1, bracket = 0;
            for (int n = 1; n <= max_order; ++n) {
                bracket += qpow;  // [n]_q = 1 + q + ... + q^{n-1}
                qpow *= q;
                b[n] = bracket;
            }
            return moments_from_recurrence(a, b, max_order);
        }
    }
    return m;
}

std::vector<double> raw_moments(const MarginalSpec& spec, int max_order) {
    const auto exact_m = exact_raw_moments(spec, max_order);
    std::vector<double> out(exact_m.size());
    for (size_t i = 0; i < exact_m.size(); ++i) out[i] = to_double(exact_m[i]);
    return out;
}

std::vector<Rational> exact_central_moments(const MarginalSpec& spec, int max_order) {
    const auto raw = exact_raw_moments(spec, max_order);
    const Rational nu = raw[1];
    std::vector<Rational> central(raw.size(), Rational(0));
    for (int j = 0; j <= max_order; ++j) {
        // m^c_j = sum_i binom(j,i) raw_i (-nu)^{j-i}
        Rational sum = 0;
        Rational neg_nu_pow = 1;
        for (int i = j; i >= 0; --i) {
            sum += Rational(binomial(j, i)) * raw[static_cast<size_t>(i)] * neg_nu_pow;
            neg_nu_pow *= -nu;
        }
        central[static_cast<size_t>(j)] = sum;
    }
    return central;
}

MomentSummary moment_summary(const MarginalSpec& spec, int order) {
    if (order < 4) order = 4;
    const auto raw = exact_raw_moments(spec, order);
    const auto central = exact_central_moments(spec, order);
    if (central[2] <= 0)
        throw validation_error("degenerate marginal: variance is zero");

    MomentSummary s;
    s.mean_exact = raw[1];
    s.mean = to_double(raw[1]);
    s.central_exact = central;
    s.central.resize(central.size());
    for (size_t i = 0; i < central.size(); ++i) s.central[i] = to_double(central[i]);
    const double m2 = s.central[2];
    s.skewness = s.central[3] / std::pow(m2, 1.5);
    s.excess_kurtosis = s.central[4] / (m2 * m2) - 3.0;
    return s;
}

MomentMatrix moment_matrix(const MarginalSpec& spec, int order) {
    if (order < 0) throw validation_error("moment matrix order must be >= 0");
    const auto m = raw_moments(spec, 2 * order);
    MomentMatrix out;
    out.order = order;
    out.entries.resize(order + 1, order + 1);
    for (int i = 0; i <= order; ++i)
        for (int j = 0; j <= order; ++j)
            out.entries(i, j) = m[static_cast<size_t>(i + j)];
    return out;
}

double MomentMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

namespace {

double qnormal_density(double x, double q) {
    if (q == 1.0) return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    const double omq = 1.0 - q;
    const double edge = 4.0 - omq * x * x;
    if (edge <= 0.0) return 0.0;
    // prod_{k>=0} ((1+q^k)^2 - (1-q) x^2 q^k) * prod_{k>=0} (1 - q^{k+1}),
    // truncated once the running factors differ from 1 by < 1e-16.
    double result = std::sqrt(omq) / (2.0 * kPi * std::sqrt(edge));
    double qk = 1.0;
    const double x2 = omq * x * x;
    for (int k = 0; k < 4096; ++k) {
        const double opqk = 1.0 + qk;
        result *= opqk * opqk - x2 * qk;
        const double qk1 = qk * q;
        result *= 1.0 - qk1;
        if (std::abs(qk1) * (2.0 + std::abs(qk1) + x2 + 1.0) < 1e-16) break;
        qk = qk1;
    }
    return result;
}

}  // namespace

double density(const MarginalSpec& spec, double x) {
    spec.validate();
    const Support sup = spec.support();
    if (x < sup.lo || x > sup.hi) return 0.0;
    switch (spec.family()) {
        case Family::Gaussian:
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
        case Family::Gamma: {
            const double beta = spec.shape();
            if (x <= 0.0) return 0.0;
            return std::exp((beta - 1.0) * std::log(x) - x - std::lgamma(beta));
        }
        case Family::Laplace:
            return 0.5 * std::exp(-std::abs(x));
        case Family::Arcsine: {
            const double t = 1.0 - x * x;
            if (t <= 0.0) return 0.0;
            return 1.0 / (kPi * std::sqrt(t));
        }
        case Family::Semicircle: {
            const double r = spec.radius();
            const double t = r * r - x * x;
            if (t <= 0.0) return 0.0;
            return 2.0 * std::sqrt(t) / (kPi * r * r);
        }
        case Family::QNormal:
            return qnormal_density(x, spec.q());
    }
    throw validation_error("unknown family enum value");
}

}  // namespace smpr

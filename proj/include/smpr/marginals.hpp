#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smpr/errors.hpp"
#include "smpr/rational.hpp"

namespace smpr {

/// Moments are supported up to this raw order (enough for order-12 increment
/// moments). Higher requests are rejected rather than silently degraded.
constexpr int kMaxMomentOrder = 24;

enum class Family { Gaussian, Gamma, Laplace, Arcsine, Semicircle, QNormal };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct Support {
    double lo;
    double hi;
    bool bounded() const;
};

/// A marginal law: family tag plus family-specific parameters.
/// Gamma carries a shape beta > 0, Semicircle a radius r > 0, QNormal a
/// parameter q in (-1, 1]. QNormal at q = 1 is the standard Gaussian.
class MarginalSpec {
public:
    static MarginalSpec gaussian();
    static MarginalSpec gamma(double beta);
    static MarginalSpec laplace();
    static MarginalSpec arcsine();
    static MarginalSpec semicircle(double radius = 1.0);
    static MarginalSpec q_normal(double q);

    Family family() const { return family_; }
    double shape() const { return shape_; }
    double radius() const { return radius_; }
    double q() const { return q_; }

    Support support() const;
    std::string describe() const;

    /// Throws validation_error on out-of-range parameters.
    void validate() const;

private:
    MarginalSpec(Family f, double shape, double radius, double q)
        : family_(f), shape_(shape), radius_(radius), q_(q) {}

    Family family_;
    double shape_;   // Gamma beta
    double radius_;  // Semicircle r
    double q_;       // QNormal q
};

/// Central-moment summary of a marginal: mean, E(X-nu)^j, Fisher skewness
/// s = m3/m2^{3/2} and excess kurtosis kappa = m4/m2^2 - 3. Exact rational
/// counterparts are kept so downstream formulas can stay exact.
struct MomentSummary {
    double mean = 0.0;
    std::vector<double> central;  // central[j] = E(X-nu)^j, j = 0..order
    double skewness = 0.0;
    double excess_kurtosis = 0.0;

    Rational mean_exact;
    std::vector<Rational> central_exact;

    double m(int j) const { return central.at(static_cast<size_t>(j)); }
};

/// Hankel matrix of raw moments M[i][j] = m_{i+j}, 0 <= i,j <= order.
struct MomentMatrix {
    int order = 0;
    Eigen::MatrixXd entries;

    double min_eigenvalue() const;
};

/// Raw moments (EX^0, ..., EX^max_order) in exact rational arithmetic.
std::vector<Rational> exact_raw_moments(const MarginalSpec& spec, int max_order);

/// Raw moments as doubles (exact values rounded once).
std::vector<double> raw_moments(const MarginalSpec& spec, int max_order);

/// Central moments E(X-nu)^j for j = 0..max_order, exact.
std::vector<Rational> exact_central_moments(const MarginalSpec& spec, int max_order);

MomentSummary moment_summary(const MarginalSpec& spec, int order = 4);

MomentMatrix moment_matrix(const MarginalSpec& spec, int order);

/// Density of the marginal at x; zero outside the support.
double density(const MarginalSpec& spec, double x);

/// Moments of a measure given its monic three-term recurrence
/// p_{n+1} = (x - a_n) p_n - b_n p_{n-1}. Exact; used for q-Normal moments
/// and as an independent cross-check for the classical families.
std::vector<Rational> moments_from_recurrence(const std::vector<Rational>& a,
                                              const std::vector<Rational>& b,
                                              int max_order);

}  // namespace smpr

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "smpr/marginals.hpp"
#include "test_support.hpp"

using namespace smpr;
using smpr_test::integrate;
using smpr_test::integrate_rel;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<MarginalSpec> all_families() {
    return {MarginalSpec::gaussian(),       MarginalSpec::gamma(2.0),
            MarginalSpec::laplace(),        MarginalSpec::arcsine(),
            MarginalSpec::semicircle(1.0),  MarginalSpec::q_normal(0.5)};
}

// integration window wide enough that the tail is below 1e-14
Support integration_window(const MarginalSpec& spec) {
    const Support s = spec.support();
    if (s.bounded()) return s;
    switch (spec.family()) {
        case Family::Gaussian: return {-12.0, 12.0};
        case Family::Laplace: return {-64.0, 64.0};
        case Family::Gamma: return {0.0, 60.0 + 12.0 * spec.shape()};
        default: return {-12.0, 12.0};
    }
}

double moment_by_quadrature(const MarginalSpec& spec, int j) {
    if (spec.family() == Family::Arcsine) {
        // angle substitution removes the edge singularity
        return integrate([&](double th) { return std::pow(std::cos(th), j) / kPi; }, 0.0, kPi,
                         1e-13);
    }
    const Support w = integration_window(spec);
    const auto f = [&](double x) { return std::pow(x, j) * density(spec, x); };
    if (spec.family() == Family::Laplace)  // split at the density kink
        return integrate_rel(f, w.lo, 0.0, 1e-12) + integrate_rel(f, 0.0, w.hi, 1e-12);
    return integrate_rel(f, w.lo, w.hi, 1e-12);
}

}  // namespace

TEST_CASE("raw moments match the closed forms") {
    SUBCASE("gamma raising factorial") {
        const auto m = raw_moments(MarginalSpec::gamma(2.0), 3);
        CHECK(m == std::vector<double>{1, 2, 6, 24});
    }
    SUBCASE("gaussian double factorials") {
        const auto m = raw_moments(MarginalSpec::gaussian(), 4);
        CHECK(m == std::vector<double>{1, 0, 1, 0, 3});
    }
    SUBCASE("semicircle catalan scaling") {
        const auto m = raw_moments(MarginalSpec::semicircle(1.0), 4);
        CHECK(m == std::vector<double>{1, 0, 0.25, 0, 0.125});
    }
    SUBCASE("arcsine against the quadrature oracle") {
        const auto m = raw_moments(MarginalSpec::arcsine(), 4);
        CHECK(m[0] == 1.0);
        CHECK(m[1] == 0.0);
        CHECK(m[2] == doctest::Approx(moment_by_quadrature(MarginalSpec::arcsine(), 2)).epsilon(1e-12));
        CHECK(m[2] == 0.5);
        CHECK(m[4] == doctest::Approx(moment_by_quadrature(MarginalSpec::arcsine(), 4)).epsilon(1e-12));
        CHECK(m[4] == 0.375);
    }
    SUBCASE("laplace even factorials") {
        const auto m = raw_moments(MarginalSpec::laplace(), 6);
        CHECK(m[2] == 2.0);
        CHECK(m[4] == 24.0);
        CHECK(m[6] == 720.0);
    }
}

TEST_CASE("moment summaries") {
    SUBCASE("laplace") {
        const MomentSummary s = moment_summary(MarginalSpec::laplace());
        CHECK(s.mean == 0.0);
        CHECK(s.m(2) == 2.0);
        CHECK(s.m(3) == 0.0);
        CHECK(s.m(4) == 24.0);
        CHECK(s.skewness == 0.0);
        CHECK(s.excess_kurtosis == doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("gamma skewness and kurtosis") {
        for (double beta : {0.5, 1.0, 2.0, 10.0}) {
            const MomentSummary s = moment_summary(MarginalSpec::gamma(beta));
            CHECK(s.skewness == doctest::Approx(2.0 / std::sqrt(beta)).epsilon(1e-13));
            CHECK(s.excess_kurtosis == doctest::Approx(6.0 / beta).epsilon(1e-13));
        }
    }
    SUBCASE("qnormal kurtosis q - 1") {
        for (double q : {-0.5, 0.0, 0.5, 1.0}) {
            const MomentSummary s = moment_summary(MarginalSpec::q_normal(q));
            CHECK(s.skewness == 0.0);
            CHECK(s.excess_kurtosis == doctest::Approx(q - 1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("moment matrices") {
    SUBCASE("gaussian order 2") {
        const MomentMatrix m = moment_matrix(MarginalSpec::gaussian(), 2);
        Eigen::MatrixXd expected(3, 3);
        expected << 1, 0, 1, 0, 1, 0, 1, 0, 3;
        CHECK((m.entries - expected).norm() == 0.0);
    }
    SUBCASE("order zero is the normalization") {
        for (const auto& spec : all_families()) {
            const MomentMatrix m = moment_matrix(spec, 0);
            CHECK(m.entries(0, 0) == 1.0);
        }
    }
    SUBCASE("arcsine order 2 from the oracle") {
        const MomentMatrix m = moment_matrix(MarginalSpec::arcsine(), 2);
        CHECK(m.entries(0, 2) == 0.5);
        CHECK(m.entries(1, 1) == 0.5);
        CHECK(m.entries(2, 2) == 0.375);
        CHECK(m.entries(1, 2) == 0.0);
    }
    SUBCASE("positive semidefinite up to order 8") {
        for (const auto& spec : all_families()) {
            const MomentMatrix m = moment_matrix(spec, 8);
            CHECK(m.min_eigenvalue() >= -1e-10);
        }
    }
}

TEST_CASE("densities") {
    CHECK(density(MarginalSpec::semicircle(1.0), 0.0) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
    CHECK(density(MarginalSpec::arcsine(), 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
    CHECK(density(MarginalSpec::laplace(), 0.0) == 0.5);
    CHECK(density(MarginalSpec::arcsine(), 1.5) == 0.0);
    CHECK(density(MarginalSpec::gamma(2.0), -1.0) == 0.0);

    SUBCASE("normalization within 1e-10") {
        for (const auto& spec : all_families()) {
            CHECK(moment_by_quadrature(spec, 0) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("qnormal density is symmetric") {
        const MarginalSpec spec = MarginalSpec::q_normal(0.3);
        for (double x : {0.1, 0.7, 1.5, 2.0})
            CHECK(density(spec, x) == doctest::Approx(density(spec, -x)).epsilon(1e-15));
    }
}

TEST_CASE("quadrature reproduces raw moments to 1e-8 relative, j <= 12") {
    for (const auto& spec : all_families()) {
        const auto m = raw_moments(spec, 12);
        for (int j = 1; j <= 12; ++j) {
            const double q = moment_by_quadrature(spec, j);
            const double scale = std::max(1.0, std::abs(m[static_cast<size_t>(j)]));
            CHECK(std::abs(q - m[static_cast<size_t>(j)]) / scale < 1e-8);
        }
    }
}

TEST_CASE("central moments round-trip through the mean shift") {
    for (const auto& spec : all_families()) {
        const auto raw = exact_raw_moments(spec, 8);
        const auto central = exact_central_moments(spec, 8);
        const Rational nu = raw[1];
        // raw_j = sum_i binom(j,i) central_i nu^{j-i}, exactly
        for (int j = 0; j <= 8; ++j) {
            Rational sum = 0;
            Rational nu_pow = 1;
            for (int i = j; i >= 0; --i) {
                sum += Rational(binomial(j, i)) * central[static_cast<size_t>(i)] * nu_pow;
                nu_pow *= nu;
            }
            CHECK(sum == raw[static_cast<size_t>(j)]);
        }
    }
}

TEST_CASE("qnormal limits") {
    SUBCASE("q -> 1 recovers gaussian moments") {
        const auto m = raw_moments(MarginalSpec::q_normal(1.0), 8);
        const auto g = raw_moments(MarginalSpec::gaussian(), 8);
        for (size_t i = 0; i < m.size(); ++i) CHECK(m[i] == g[i]);
    }
    SUBCASE("q = 0 equals the radius-2 semicircle") {
        const auto m = raw_moments(MarginalSpec::q_normal(0.0), 10);
        const auto w = raw_moments(MarginalSpec::semicircle(2.0), 10);
        for (size_t i = 0; i < m.size(); ++i) CHECK(m[i] == doctest::Approx(w[i]).epsilon(1e-14));
    }
    SUBCASE("qnormal odd moments vanish") {
        const auto m = exact_raw_moments(MarginalSpec::q_normal(0.7), 11);
        for (size_t j = 1; j < m.size(); j += 2) CHECK(m[j] == 0);
    }
}

TEST_CASE("classical families agree with their recurrence-generated moments") {
    // the same monic-recurrence machinery that generates q-Normal moments
    // must reproduce the closed forms of the other families
    SUBCASE("gaussian") {
        std::vector<Rational> a(13, Rational(0)), b(14, Rational(0));
        for (int n = 1; n <= 13; ++n) b[static_cast<size_t>(n)] = n;
        CHECK(moments_from_recurrence(a, b, 12) == exact_raw_moments(MarginalSpec::gaussian(), 12));
    }
    SUBCASE("gamma") {
        const Rational beta = 2;
        std::vector<Rational> a(13), b(14);
        for (int n = 0; n <= 12; ++n) a[static_cast<size_t>(n)] = 2 * n + beta;
        for (int n = 1; n <= 13; ++n) b[static_cast<size_t>(n)] = n * (n + beta - 1);
        CHECK(moments_from_recurrence(a, b, 12) ==
              exact_raw_moments(MarginalSpec::gamma(2.0), 12));
    }
    SUBCASE("arcsine") {
        std::vector<Rational> a(13, Rational(0)), b(14, Rational(0));
        b[1] = Rational(1, 2);
        for (int n = 2; n <= 13; ++n) b[static_cast<size_t>(n)] = Rational(1, 4);
        CHECK(moments_from_recurrence(a, b, 12) == exact_raw_moments(MarginalSpec::arcsine(), 12));
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(raw_moments(MarginalSpec::gaussian(), 25), validation_error);
    CHECK_THROWS_AS(raw_moments(MarginalSpec::gaussian(), -1), validation_error);
    CHECK_THROWS_AS(raw_moments(MarginalSpec::gamma(0.0), 2), validation_error);
    CHECK_THROWS_AS(raw_moments(MarginalSpec::gamma(-1.0), 2), validation_error);
    CHECK_THROWS_AS(raw_moments(MarginalSpec::q_normal(-1.0), 2), validation_error);
    CHECK_THROWS_AS(raw_moments(MarginalSpec::q_normal(1.5), 2), validation_error);
    CHECK_THROWS_AS(raw_moments(MarginalSpec::semicircle(0.0), 2), validation_error);
    CHECK_THROWS_AS(family_from_name("cauchy"), validation_error);
    CHECK(family_from_name("qnormal") == Family::QNormal);
}

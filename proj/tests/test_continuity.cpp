#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "smpr/continuity.hpp"
#include "smpr/orthopoly.hpp"

using namespace smpr;

namespace {

std::vector<MarginalSpec> all_families() {
    return {MarginalSpec::gaussian(),       MarginalSpec::gamma(2.0),
            MarginalSpec::laplace(),        MarginalSpec::arcsine(),
            MarginalSpec::semicircle(1.0),  MarginalSpec::q_normal(0.5)};
}

MomentSummary beta_summary(double g, double b) {
    // skewness/kurtosis closed forms of the symmetric-support Beta family
    MomentSummary s;
    s.mean = 0.0;
    const double skew =
        2.0 * (b - g) * std::sqrt(g + b + 1.0) / ((g + b + 2.0) * std::sqrt(g * b));
    const double kurt = 6.0 * ((g - b) * (g - b) * (g + b + 1.0) - g * b * (g + b + 2.0)) /
                        (g * b * (g + b + 2.0) * (g + b + 3.0));
    s.skewness = skew;
    s.excess_kurtosis = kurt;
    // any m2 > 0 realizes these shape parameters
    s.central = {1.0, 0.0, 1.0, skew, kurt + 3.0};
    return s;
}

}  // namespace

TEST_CASE("continuity coefficients of the six marginals") {
    CHECK(continuity_coefficient(moment_summary(MarginalSpec::gaussian())) == 2.0);
    for (double beta : {0.5, 1.0, 2.0, 10.0})
        CHECK(continuity_coefficient(moment_summary(MarginalSpec::gamma(beta))) ==
              doctest::Approx(2.0).epsilon(1e-14));
    CHECK(continuity_coefficient(moment_summary(MarginalSpec::laplace())) ==
          doctest::Approx(1.6).epsilon(1e-15));
    CHECK(continuity_coefficient(moment_summary(MarginalSpec::arcsine())) ==
          doctest::Approx(4.0).epsilon(1e-15));
    CHECK(continuity_coefficient(moment_summary(MarginalSpec::semicircle(1.0))) ==
          doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    for (double q : {-0.5, 0.0, 0.5, 1.0})
        CHECK(continuity_coefficient(moment_summary(MarginalSpec::q_normal(q))) ==
              doctest::Approx((8.0 + 4.0 * q) / (3.0 + 3.0 * q)).epsilon(1e-14));
}

TEST_CASE("beta shape parameters give C = 2 + 2/(gamma+beta)") {
    for (auto [g, b] : {std::pair{0.5, 0.5}, std::pair{1.5, 1.5}, std::pair{1.0, 2.0}}) {
        const double c = continuity_coefficient(beta_summary(g, b));
        CHECK(c == doctest::Approx(2.0 + 2.0 / (g + b)).epsilon(1e-12));
    }
}

TEST_CASE("increment expansions") {
    SUBCASE("order 2 is 2 m2 (1 - e^{-a t}) for every family") {
        for (const auto& spec : all_families()) {
            const CoeffMatrix c = basis_from_moments(spec, 2);
            const IncrementExpansion exp = increment_expansion(c, 1);
            const double m2 = moment_summary(spec).m(2);
            CHECK(exp.coeff(1) == doctest::Approx(2.0 * m2).epsilon(1e-13));
            const AlphaSequence alpha = AlphaSequence::from_law(RatioLaw::Linear, 0.7);
            for (double t : {0.0, 0.3, 2.0})
                CHECK(exp.value(t, alpha) ==
                      doctest::Approx(2.0 * m2 * (1.0 - std::exp(-0.7 * t))).epsilon(1e-13));
        }
    }
    SUBCASE("order 4 matches the central-moment closed form") {
        for (const auto& spec : all_families()) {
            const CoeffMatrix c = basis_from_moments(spec, 4);
            const IncrementExpansion exp = increment_expansion(c, 2);
            const MomentSummary s = moment_summary(spec);
            const double m2 = s.m(2), m3 = s.m(3), m4 = s.m(4);
            const AlphaSequence alpha = AlphaSequence::from_ratios({1.0, 1.9}, 1.3);
            for (double t : {0.1, 0.8, 3.0}) {
                const double e1 = std::exp(-alpha.alpha(1) * t), e2 = std::exp(-alpha.alpha(2) * t);
                const double closed = 2.0 * (m4 + 3.0 * m2 * m2) -
                                      2.0 * e1 * (4.0 * m2 * m4 - 3.0 * m3 * m3) / m2 +
                                      6.0 * e2 * (m2 * m4 - m3 * m3 - m2 * m2 * m2) / m2;
                CHECK(exp.value(t, alpha) == doctest::Approx(closed).epsilon(1e-12));
            }
        }
    }
    SUBCASE("gaussian matches (2k)!/k! (1 - e^{-at})^k for k <= 5") {
        const CoeffMatrix c = basis_from_moments(MarginalSpec::gaussian(), 10);
        const AlphaSequence alpha = AlphaSequence::from_law(RatioLaw::Linear, 1.0);
        for (int k = 1; k <= 5; ++k) {
            const IncrementExpansion exp = increment_expansion(c, k);
            double fact = 1.0;
            for (int i = k + 1; i <= 2 * k; ++i) fact *= i;
            for (double t : {0.05, 0.5, 2.0}) {
                const double closed = fact * std::pow(1.0 - std::exp(-t), k);
                CHECK(exp.value(t, alpha) == doctest::Approx(closed).epsilon(1e-10));
            }
            CHECK(exp.value(0.0, alpha) == 0.0);
        }
    }
    SUBCASE("order too low is rejected") {
        const CoeffMatrix c = basis_from_moments(MarginalSpec::gaussian(), 3);
        CHECK_THROWS_AS(increment_expansion(c, 2), validation_error);
    }
}

TEST_CASE("solve_alpha reproduces the paper's rate ratios") {
    SUBCASE("laplace k=3") {
        const CoeffMatrix c = basis_from_moments(MarginalSpec::laplace(), 6);
        const ContinuityReport r = solve_alpha(c, 3);
        CHECK(r.positive);
        CHECK(r.ratios[1] ==
              doctest::Approx((35.0 - std::sqrt(105.0)) / 28.0).epsilon(1e-10));
        CHECK(r.ratios[2] ==
              doctest::Approx((15.0 - std::sqrt(105.0)) / 12.0).epsilon(1e-10));
        CHECK(r.max_relative_residual < 1e-9);
        CHECK(r.order_r == 2);
        CHECK(r.hoelder_bound == doctest::Approx(2.0 / 6.0));
        // conjugate branch is reported as a further positive root
        REQUIRE(r.other_roots.size() >= 1);
        CHECK(r.other_roots[0][1] ==
              doctest::Approx((35.0 + std::sqrt(105.0)) / 28.0).epsilon(1e-8));
    }
    SUBCASE("semicircle k=4") {
        const CoeffMatrix c = basis_from_moments(MarginalSpec::semicircle(1.0), 8);
        const ContinuityReport r = solve_alpha(c, 4);
        CHECK(r.ratios[1] == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
        CHECK(r.ratios[2] == doctest::Approx(5.0).epsilon(1e-10));
        CHECK(r.ratios[3] == doctest::Approx(8.0).epsilon(1e-10));
    }
    SUBCASE("gaussian and gamma k=4 give the linear law") {
        for (const auto& spec : {MarginalSpec::gaussian(), MarginalSpec::gamma(2.0)}) {
            const CoeffMatrix c = basis_from_moments(spec, 8);
            const ContinuityReport r = solve_alpha(c, 4);
            CHECK(r.ratios[1] == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(r.ratios[2] == doctest::Approx(3.0).epsilon(1e-10));
            CHECK(r.ratios[3] == doctest::Approx(4.0).epsilon(1e-10));
        }
    }
    SUBCASE("arcsine k=4 gives the quadratic law") {
        const CoeffMatrix c = basis_from_moments(MarginalSpec::arcsine(), 8);
        const ContinuityReport r = solve_alpha(c, 4);
        CHECK(r.ratios[1] == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(r.ratios[2] == doctest::Approx(9.0).epsilon(1e-10));
        CHECK(r.ratios[3] == doctest::Approx(16.0).epsilon(1e-10));
    }
    SUBCASE("k=2 equals the continuity coefficient, all families") {
        for (const auto& spec : all_families()) {
            const CoeffMatrix c = basis_from_moments(spec, 4);
            const ContinuityReport r = solve_alpha(c, 2);
            const double C = continuity_coefficient(moment_summary(spec));
            CHECK(r.ratios[1] == doctest::Approx(C).epsilon(1e-10));
            CHECK(r.continuity_coefficient == doctest::Approx(C).epsilon(1e-12));
        }
    }
}

TEST_CASE("solved ratios kill the low-order increment derivatives") {
    struct Case {
        MarginalSpec spec;
        int k;
    };
    const Case cases[] = {{MarginalSpec::laplace(), 3},
                          {MarginalSpec::gaussian(), 4},
                          {MarginalSpec::arcsine(), 4},
                          {MarginalSpec::semicircle(1.0), 4}};
    for (const auto& cs : cases) {
        const CoeffMatrix c = basis_from_moments(cs.spec, 2 * cs.k);
        const IncrementExpansion exp = increment_expansion(c, cs.k);
        const ContinuityReport r = solve_alpha(c, cs.k);
        const AlphaSequence alpha = AlphaSequence::from_ratios(r.ratios);
        double d_scale = 0.0;
        for (double d : exp.coeffs) d_scale += std::abs(d);

        // analytic Taylor coefficients vanish through t^{k-1}
        for (int s = 1; s <= cs.k - 1; ++s)
            CHECK(std::abs(exp.taylor_coefficient(s, alpha)) < 1e-9 * d_scale);

        // finite differences agree (Richardson-extrapolated central stencils)
        const auto f = [&](double t) { return exp.value(t, alpha); };
        const auto d1 = [&](double h) { return (f(h) - f(-h)) / (2.0 * h); };
        const auto d2 = [&](double h) { return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h); };
        const auto d3 = [&](double h) {
            return (f(2 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2 * h)) / (2.0 * h * h * h);
        };
        const double h = 1e-2;
        const double fd1 = (4.0 * d1(h) - d1(2.0 * h)) / 3.0;
        CHECK(std::abs(fd1) < 1e-6 * d_scale);
        if (cs.k >= 3) {
            const double fd2 = (4.0 * d2(h) - d2(2.0 * h)) / 3.0;
            CHECK(std::abs(fd2) < 1e-6 * d_scale);
        }
        if (cs.k >= 4) {
            const double fd3 = (4.0 * d3(h) - d3(2.0 * h)) / 3.0;
            CHECK(std::abs(fd3) < 1e-6 * d_scale);
        }
    }
}

TEST_CASE("rate scale only rescales time") {
    const CoeffMatrix c = basis_from_moments(MarginalSpec::gamma(2.0), 6);
    const IncrementExpansion exp = increment_expansion(c, 3);
    const AlphaSequence a1 = AlphaSequence::from_law(RatioLaw::Linear, 1.0);
    const AlphaSequence a3 = a1.rescaled(3.0);
    for (double t : {0.1, 0.7})
        CHECK(exp.value(t, a3) == doctest::Approx(exp.value(3.0 * t, a1)).epsilon(1e-14));
}

TEST_CASE("conditional moments") {
    const MarginalSpec spec = MarginalSpec::gamma(2.0);
    const CoeffMatrix c = basis_from_moments(spec, 6);
    const OrthoBasis basis = basis_from_recurrence(spec, 6);
    const AlphaSequence alpha = AlphaSequence::from_law(RatioLaw::Linear, 1.0);
    const auto m = raw_moments(spec, 6);

    SUBCASE("t = 0 reconstructs y^j") {
        for (int j = 0; j <= 6; ++j)
            for (double y : {0.5, 1.0, 3.0})
                CHECK(conditional_moment(c, basis, alpha, j, y, 0.0) ==
                      doctest::Approx(std::pow(y, j)).epsilon(1e-11));
    }
    SUBCASE("t -> infinity leaves the raw moment") {
        for (int j = 0; j <= 6; ++j)
            CHECK(conditional_moment(c, basis, alpha, j, 1.7, 500.0) ==
                  doctest::Approx(m[static_cast<size_t>(j)]).epsilon(1e-12));
    }
    SUBCASE("gaussian first moment decays exponentially") {
        const MarginalSpec g = MarginalSpec::gaussian();
        const CoeffMatrix cg = basis_from_moments(g, 4);
        const OrthoBasis bg = basis_from_recurrence(g, 4);
        for (double t : {0.0, 0.4, 2.0})
            CHECK(conditional_moment(cg, bg, alpha, 1, 1.3, t) ==
                  doctest::Approx(std::exp(-t) * 1.3).epsilon(1e-13));
    }
    SUBCASE("index out of range") {
        CHECK_THROWS_AS(conditional_moment(c, basis, alpha, 7, 1.0, 0.5), validation_error);
    }
}

TEST_CASE("alpha admissibility") {
    const std::vector<double> t_grid = {0.25, 1.0, 4.0};
    SUBCASE("linear law passes everything") {
        const AlphaSequence alpha = AlphaSequence::from_law(RatioLaw::Linear);
        for (const auto& spec : {MarginalSpec::gaussian(), MarginalSpec::gamma(2.0)}) {
            const AdmissibilityReport r = alpha_admissibility(alpha, spec, t_grid);
            CHECK(r.concave);
            CHECK(r.hankel_required);
            CHECK(r.hankel_even_ok);
            CHECK(r.hankel_shifted_ok);
            CHECK(r.bimom_ok);
            CHECK(r.summable);
            CHECK(r.admissible());
        }
    }
    SUBCASE("quadratic law fails the 2x2 Hankel minor") {
        const AlphaSequence alpha = AlphaSequence::from_law(RatioLaw::Quadratic);
        const AdmissibilityReport r = alpha_admissibility(alpha, MarginalSpec::arcsine(), t_grid);
        CHECK_FALSE(r.hankel_even_ok);
        CHECK(r.hankel_min_eig < -1e-9);
        // bounded support: the failing Hankel test is not required
        CHECK_FALSE(r.hankel_required);
        CHECK(r.bimom_ok);
        CHECK(r.admissible());
        // the exact minor from the paper's remark
        const double t = 1.0;
        const double det = std::exp(-4.0 * t) - std::exp(-2.0 * t);
        CHECK(det < 0.0);
    }
    SUBCASE("concavity checker on explicit lists") {
        const AlphaSequence ok = AlphaSequence::from_ratios({1.0, 3.0, 4.0});
        const AdmissibilityReport r1 =
            alpha_admissibility(ok, MarginalSpec::arcsine(), t_grid, 3);
        CHECK(r1.concave);
        const AlphaSequence bad = AlphaSequence::from_ratios({1.0, 2.0, 4.0});
        const AdmissibilityReport r2 =
            alpha_admissibility(bad, MarginalSpec::arcsine(), t_grid, 3);
        CHECK_FALSE(r2.concave);
        CHECK(r2.concavity_violation_at == 2);
    }
    SUBCASE("random concave / non-concave sequences agree with the inequality") {
        std::mt19937 gen(7);
        std::uniform_real_distribution<double> jump(0.05, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> ratios{1.0};
            // concave by construction: increments shrink
            double inc = jump(gen);
            for (int n = 2; n <= 6; ++n) {
                inc *= std::uniform_real_distribution<double>(0.4, 1.0)(gen);
                ratios.push_back(ratios.back() + inc);
            }
            const bool expect_concave = true;
            const AlphaSequence alpha = AlphaSequence::from_ratios(ratios);
            const AdmissibilityReport r =
                alpha_admissibility(alpha, MarginalSpec::arcsine(), t_grid, 6);
            CHECK(r.concave == expect_concave);
        }
    }
}

TEST_CASE("degenerate moment sequences") {
    SUBCASE("geometric sequence is a point mass") {
        std::vector<double> b;
        double p = 1.0;
        for (int i = 0; i <= 8; ++i, p *= 0.6) b.push_back(p);
        const DegenerateClassification cls = classify_degenerate(b);
        CHECK(cls.kind == DegenerateClassification::Kind::OnePoint);
        CHECK(cls.location == doctest::Approx(0.6).epsilon(1e-12));
        for (size_t i = 0; i < b.size(); ++i)
            CHECK(cls.predicted[i] == doctest::Approx(b[i]).epsilon(1e-10));
    }
    SUBCASE("alternating sequence is a two-point law") {
        const std::vector<double> b = {1.0, 0.5, 1.0, 0.5, 1.0, 0.5, 1.0, 0.5, 1.0};
        const DegenerateClassification cls = classify_degenerate(b);
        CHECK(cls.kind == DegenerateClassification::Kind::TwoPoint);
        CHECK(cls.location == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cls.weight_p == doctest::Approx(0.75).epsilon(1e-12));
        for (size_t i = 0; i < b.size(); ++i)
            CHECK(cls.predicted[i] == doctest::Approx(b[i]).epsilon(1e-10));
    }
    SUBCASE("gaussian moments are non-degenerate") {
        const DegenerateClassification cls = classify_degenerate({1.0, 0.0, 1.0, 0.0, 3.0});
        CHECK(cls.kind == DegenerateClassification::Kind::NonDegenerate);
    }
    SUBCASE("b0 must be 1") {
        CHECK_THROWS_AS(classify_degenerate({2.0, 1.0}), validation_error);
    }
}

TEST_CASE("harness detection") {
    const auto report_for = [](const MarginalSpec& spec) {
        const CoeffMatrix c = basis_from_moments(spec, 4);
        return solve_alpha(c, 2);
    };
    CHECK(harness_detect(report_for(MarginalSpec::gamma(2.0)), MarginalSpec::gamma(2.0)));
    CHECK(harness_detect(report_for(MarginalSpec::gaussian()), MarginalSpec::gaussian()));
    CHECK_FALSE(harness_detect(report_for(MarginalSpec::arcsine()), MarginalSpec::arcsine()));
    CHECK_FALSE(harness_detect(report_for(MarginalSpec::laplace()), MarginalSpec::laplace()));
    CHECK_FALSE(
        harness_detect(report_for(MarginalSpec::semicircle(1.0)), MarginalSpec::semicircle(1.0)));
}

TEST_CASE("alpha sequence validation") {
    CHECK_THROWS_AS(AlphaSequence::from_ratios({}), validation_error);
    CHECK_THROWS_AS(AlphaSequence::from_ratios({2.0}), validation_error);
    CHECK_THROWS_AS(AlphaSequence::from_ratios({1.0, -0.5}), validation_error);
    CHECK_THROWS_AS(AlphaSequence::from_ratios({1.0, 2.0}, 0.0), validation_error);
    const AlphaSequence a = AlphaSequence::from_ratios({1.0, 2.5}, 2.0);
    CHECK(a.alpha(0) == 0.0);
    CHECK(a.alpha(2) == 5.0);
    CHECK_THROWS_AS(a.ratio(3), validation_error);
    const AlphaSequence law = AlphaSequence::from_law(RatioLaw::SemicircleLaw);
    CHECK(law.ratio(3) == doctest::Approx(5.0));
}

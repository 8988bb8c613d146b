#include "smpr/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace smpr {

double ratio_law_value(RatioLaw law, int n) {
    switch (law) {
        case RatioLaw::Linear: return static_cast<double>(n);
        case RatioLaw::Quadratic: return static_cast<double>(n) * n;
        case RatioLaw::SemicircleLaw: return static_cast<double>(n) * (n + 2) / 3.0;
    }
    throw validation_error("unknown ratio law");
}

std::string ratio_law_name(RatioLaw law) {
    switch (law) {
        case RatioLaw::Linear: return "n";
        case RatioLaw::Quadratic: return "n^2";
        case RatioLaw::SemicircleLaw: return "n(n+2)/3";
    }
    throw validation_error("unknown ratio law");
}

AlphaSequence AlphaSequence::from_ratios(std::vector<double> ratios, double scale) {
    if (!(scale > 0.0)) throw validation_error("alpha scale must be > 0");
    if (ratios.empty()) throw validation_error("alpha ratio list must not be empty");
    if (std::abs(ratios.front() - 1.0) > 1e-12)
        throw validation_error("alpha ratios must be normalized with rho_1 = 1");
    for (double r : ratios)
        if (!(r > 0.0)) throw validation_error("alpha ratios must be positive");
    AlphaSequence seq;
    seq.scale_ = scale;
    seq.ratios_ = std::move(ratios);
    return seq;
}

AlphaSequence AlphaSequence::from_law(RatioLaw law, double scale) {
    if (!(scale > 0.0)) throw validation_error("alpha scale must be > 0");
    AlphaSequence seq;
    seq.scale_ = scale;
    seq.law_ = law;
    return seq;
}

int AlphaSequence::max_index() const {
    return law_ ? std::numeric_limits<int>::max() : static_cast<int>(ratios_.size());
}

double AlphaSequence::ratio(int n) const {
    if (n < 0) throw validation_error("alpha index must be >= 0");
    if (n == 0) return 0.0;
    if (law_) return ratio_law_value(*law_, n);
    if (n > static_cast<int>(ratios_.size()))
        throw validation_error("alpha ratio index " + std::to_string(n) +
                               " beyond explicit list of length " +
                               std::to_string(ratios_.size()));
    return ratios_[static_cast<size_t>(n) - 1];
}

std::vector<double> AlphaSequence::ratios(int count) const {
    std::vector<double> out(static_cast<size_t>(count));
    for (int n = 1; n <= count; ++n) out[static_cast<size_t>(n) - 1] = ratio(n);
    return out;
}

AlphaSequence AlphaSequence::rescaled(double new_scale) const {
    AlphaSequence seq = *this;
    if (!(new_scale > 0.0)) throw validation_error("alpha scale must be > 0");
    seq.scale_ = new_scale;
    return seq;
}

double IncrementExpansion::limit() const {
    double sum = 0.0;
    for (double d : coeffs) sum += d;
    return sum;
}

double IncrementExpansion::value(double t, const AlphaSequence& alpha) const {
    double sum = 0.0;
    for (int n = 1; n <= k; ++n) sum -= coeff(n) * std::expm1(-alpha.alpha(n) * t);
    return sum;
}

double IncrementExpansion::taylor_coefficient(int s, const AlphaSequence& alpha) const {
    // sum_n D_n (1 - e^{-alpha_n t}) = sum_s (-1)^{s-1} t^s / s! * sum_n D_n alpha_n^s
    double sum = 0.0;
    for (int n = 1; n <= k; ++n) sum += coeff(n) * std::pow(alpha.alpha(n), s);
    double fact = 1.0;
    for (int i = 2; i <= s; ++i) fact *= i;
    return (s % 2 == 1 ? 1.0 : -1.0) * sum / fact;
}

double IncrementExpansion::rown_sum(int s, const std::vector<double>& rho) const {
    double sum = 0.0;
    for (int n = 1; n <= k; ++n) sum += coeff(n) * std::pow(rho.at(static_cast<size_t>(n) - 1), s);
    return sum;
}

double IncrementExpansion::rown_scale(int s, const std::vector<double>& rho) const {
    double sum = 0.0;
    for (int n = 1; n <= k; ++n)
        sum += std::abs(coeff(n)) * std::pow(rho.at(static_cast<size_t>(n) - 1), s);
    return sum;
}

IncrementExpansion increment_expansion(const CoeffMatrix& c, int k) {
    if (k < 1) throw validation_error("increment half-order k must be >= 1");
    if (c.order() < 2 * k)
        throw validation_error("coefficient matrix order " + std::to_string(c.order()) +
                               " too low for 2k = " + std::to_string(2 * k));
    IncrementExpansion exp;
    exp.k = k;
    exp.coeffs.resize(static_cast<size_t>(k));
    const ExactLDL* exact = c.exact();
    for (int n = 1; n <= k; ++n) {
        // D_n = -sum_{j=n}^{2k} (-1)^j binom(2k,j) c_{j,n} c_{2k-j,n};
        // nonzero terms need j >= n and 2k - j >= n.
        if (exact) {
            Rational sum = 0;
            for (int j = n; j <= 2 * k - n; ++j) {
                Rational term = Rational(binomial(2 * k, j)) * exact->coeff_product(j, 2 * k - j, n);
                sum += (j % 2 == 0) ? term : -term;
            }
            exp.coeffs[static_cast<size_t>(n) - 1] = to_double(-sum);
        } else {
            double sum = 0.0;
            for (int j = n; j <= 2 * k - n; ++j) {
                const double term =
                    to_double(Rational(binomial(2 * k, j))) * c.at(j, n) * c.at(2 * k - j, n);
                sum += (j % 2 == 0) ? term : -term;
            }
            exp.coeffs[static_cast<size_t>(n) - 1] = -sum;
        }
    }
    return exp;
}

double continuity_coefficient(const MomentSummary& summary) {
    if (summary.central_exact.size() >= 5) {
        const Rational& m2 = summary.central_exact[2];
        const Rational& m3 = summary.central_exact[3];
        const Rational& m4 = summary.central_exact[4];
        const Rational den = 3 * (m4 * m2 - m3 * m3 - m2 * m2 * m2);
        if (den == 0)
            throw numeric_error(
                "two-point-like marginal: m4 m2 = m3^2 + m2^3, continuity coefficient undefined");
        const Rational raw_form = (4 * m4 * m2 - 3 * m3 * m3) / den;
        // The kurtosis/skewness form is the same rational function; evaluate it
        // separately as a cross-check of the transcription.
        const Rational m2sq = m2 * m2, m2cb = m2sq * m2;
        const Rational kappa_num = m4 - 3 * m2sq;           // kappa * m2^2
        const Rational s2_num = m3 * m3;                    // s^2 * m2^3
        const Rational num = 12 * m2cb + 4 * kappa_num * m2 - 3 * s2_num;
        const Rational den2 = 6 * m2cb + 3 * kappa_num * m2 - 3 * s2_num;
        const Rational moment_form = num / den2;
        if (raw_form != moment_form)
            throw numeric_error("continuity coefficient forms disagree");
        return to_double(raw_form);
    }
    const double m2 = summary.m(2), m3 = summary.m(3), m4 = summary.m(4);
    const double den = 3.0 * (m4 * m2 - m3 * m3 - m2 * m2 * m2);
    if (std::abs(den) < 1e-300)
        throw numeric_error(
            "two-point-like marginal: m4 m2 = m3^2 + m2^3, continuity coefficient undefined");
    const double raw_form = (4.0 * m4 * m2 - 3.0 * m3 * m3) / den;
    const double s2 = summary.skewness * summary.skewness;
    const double kappa = summary.excess_kurtosis;
    const double moment_form = (12.0 + 4.0 * kappa - 3.0 * s2) / (6.0 + 3.0 * kappa - 3.0 * s2);
    if (std::abs(raw_form - moment_form) > 1e-12 * std::max(1.0, std::abs(raw_form)))
        throw numeric_error("continuity coefficient forms disagree", raw_form - moment_form);
    return raw_form;
}

namespace {

struct NewtonOutcome {
    std::vector<double> rho;  // rho_1..rho_k
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // max relative residual over equations
};

double max_relative_residual(const IncrementExpansion& exp, const std::vector<double>& rho) {
    double worst = 0.0;
    for (int s = 1; s <= exp.k - 1; ++s) {
        const double scale = std::max(exp.rown_scale(s, rho), 1e-300);
        worst = std::max(worst, std::abs(exp.rown_sum(s, rho)) / scale);
    }
    return worst;
}

NewtonOutcome newton_from(const IncrementExpansion& exp, std::vector<double> start) {
    const int k = exp.k;
    const int m = k - 1;  // unknowns rho_2..rho_k
    NewtonOutcome out;
    out.rho = std::move(start);

    Eigen::VectorXd g(m);
    Eigen::MatrixXd jac(m, m);
    for (int iter = 0; iter < 120; ++iter) {
        for (int s = 1; s <= m; ++s) g(s - 1) = exp.rown_sum(s, out.rho);
        out.residual = max_relative_residual(exp, out.rho);
        out.iterations = iter;
        if (out.residual < 1e-13) {
            out.converged = true;
            return out;
        }
        for (int s = 1; s <= m; ++s)
            for (int n = 2; n <= k; ++n)
                jac(s - 1, n - 2) = exp.coeff(n) * s *
                                    std::pow(out.rho[static_cast<size_t>(n) - 1], s - 1);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) return out;
        const Eigen::VectorXd step = lu.solve(-g);
        // Backtracking damping on the euclidean residual.
        const double g0 = g.norm();
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30; ++half) {
            std::vector<double> trial = out.rho;
            for (int n = 2; n <= k; ++n)
                trial[static_cast<size_t>(n) - 1] += lambda * step(n - 2);
            Eigen::VectorXd gt(m);
            for (int s = 1; s <= m; ++s) gt(s - 1) = exp.rown_sum(s, trial);
            if (gt.norm() < g0 || g0 == 0.0) {
                out.rho = std::move(trial);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return out;
    }
    out.residual = max_relative_residual(exp, out.rho);
    return out;
}

bool all_positive(const std::vector<double>& rho) {
    for (double r : rho)
        if (!(r > 0.0)) return false;
    return true;
}

bool same_root(const std::vector<double>& a, const std::vector<double>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-6 * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

// Concavity of (0, rho_1, ..., rho_k): the admissibility requirement that a
// moment-sequence rate family must satisfy.
bool concave_with_zero(const std::vector<double>& rho) {
    std::vector<double> a(rho.size() + 1, 0.0);
    for (size_t i = 0; i < rho.size(); ++i) a[i + 1] = rho[i];
    for (size_t m = 1; m + 1 < a.size(); ++m)
        if (2.0 * a[m] < a[m - 1] + a[m + 1] - 1e-9) return false;
    return true;
}

}  // namespace

ContinuityReport solve_alpha(const CoeffMatrix& c, int k) {
    if (k < 2) throw validation_error("solve_alpha requires k >= 2");
    const IncrementExpansion exp = increment_expansion(c, k);

    std::vector<std::vector<double>> starts;
    for (RatioLaw law : {RatioLaw::Linear, RatioLaw::Quadratic, RatioLaw::SemicircleLaw}) {
        std::vector<double> s(static_cast<size_t>(k));
        for (int n = 1; n <= k; ++n) s[static_cast<size_t>(n) - 1] = ratio_law_value(law, n);
        starts.push_back(std::move(s));
    }
    // deterministic coarse grid to reach every solution branch
    const std::vector<double> levels = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<size_t> idx(static_cast<size_t>(k) - 1, 0);
    while (true) {
        std::vector<double> s(static_cast<size_t>(k));
        s[0] = 1.0;
        for (int n = 2; n <= k; ++n) s[static_cast<size_t>(n) - 1] = levels[idx[static_cast<size_t>(n) - 2]];
        starts.push_back(std::move(s));
        size_t d = 0;
        while (d < idx.size() && ++idx[d] == levels.size()) idx[d++] = 0;
        if (d == idx.size()) break;
    }

    std::vector<std::vector<double>> roots;       // converged, all-positive
    std::vector<std::vector<double>> bad_roots;   // converged, some rho <= 0
    int iterations = 0;
    for (auto& start : starts) {
        NewtonOutcome out = newton_from(exp, start);
        if (!out.converged) continue;
        iterations = std::max(iterations, out.iterations);
        auto& bucket = all_positive(out.rho) ? roots : bad_roots;
        const bool dup = std::any_of(bucket.begin(), bucket.end(),
                                     [&](const auto& r) { return same_root(r, out.rho); });
        if (!dup) bucket.push_back(out.rho);
    }

    if (roots.empty()) {
        if (!bad_roots.empty())
            throw numeric_error(
                "continuity system solved but a ratio is nonpositive; no continuous "
                "modification by this construction");
        throw numeric_error("Newton iteration failed to converge on the continuity system");
    }

    // Several positive roots can coexist. Concave branches are the ones that
    // can extend to admissible rate sequences, so they come first; smallest
    // rho_2 breaks ties, matching the solved examples. Convex laws (bounded
    // supports, n^2-type growth) survive through the fallback.
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        const bool ca = concave_with_zero(a), cb = concave_with_zero(b);
        if (ca != cb) return ca;
        return a[1] < b[1];
    });

    ContinuityReport report;
    // C = -D_1/D_2 of the order-4 expansion, the forced rho_2.
    const IncrementExpansion order4 = increment_expansion(c, 2);
    if (order4.coeff(2) == 0.0)
        throw numeric_error("two-point-like marginal: order-4 expansion has no c_{2,2} term");
    report.continuity_coefficient = -order4.coeff(1) / order4.coeff(2);
    report.k = k;
    report.ratios = roots.front();
    report.positive = true;
    report.order_r = k - 1;
    report.hoelder_bound = static_cast<double>(k - 1) / (2.0 * k);
    report.max_relative_residual = max_relative_residual(exp, report.ratios);
    report.newton_iterations = iterations;
    for (size_t i = 1; i < roots.size(); ++i) report.other_roots.push_back(roots[i]);
    return report;
}

double conditional_moment(const CoeffMatrix& c, const OrthoBasis& basis,
                          const AlphaSequence& alpha, int j, double y, double t) {
    if (j < 0 || j > c.order()) throw validation_error("conditional moment order out of range");
    if (t < 0.0) throw validation_error("conditional moment requires t >= 0");
    if (basis.degree() < j) throw validation_error("basis degree too low");
    std::vector<double> h;
    basis.eval_all(j, y, h);
    double sum = 0.0;
    for (int n = 0; n <= j; ++n)
        sum += c.at(j, n) * std::exp(-alpha.alpha(n) * t) * h[static_cast<size_t>(n)];
    return sum;
}

namespace {

double hankel_min_eig(const std::vector<double>& values, int size) {
    Eigen::MatrixXd h(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) h(i, j) = values.at(static_cast<size_t>(i + j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

bool AdmissibilityReport::admissible() const {
    if (!bimom_ok || !summable) return false;
    // concavity and the Hankel positivity both stem from the moment-sequence
    // requirement, which binds only for unbounded supports
    if (hankel_required && !(concave && hankel_even_ok && hankel_shifted_ok)) return false;
    return true;
}

AdmissibilityReport alpha_admissibility(const AlphaSequence& alpha, const MarginalSpec& spec,
                                        const std::vector<double>& t_grid, int n_terms) {
    const int n = std::min(n_terms, alpha.max_index());
    if (n < 3) throw validation_error("admissibility needs at least 3 alpha terms");

    AdmissibilityReport report;
    report.terms = n;

    std::vector<double> a(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) a[static_cast<size_t>(i)] = alpha.alpha(i);

    // (a) concavity over the provided terms: 2 a_m >= a_{m-1} + a_{m+1}
    for (int m = 2; m < n; ++m) {
        if (2.0 * a[static_cast<size_t>(m)] <
            a[static_cast<size_t>(m) - 1] + a[static_cast<size_t>(m) + 1] - 1e-12) {
            report.concave = false;
            report.concavity_violation_at = m;
            break;
        }
    }

    report.hankel_required = !spec.support().bounded();

    // (b) both Hankel matrices of e^{-alpha_n t} on each grid time
    report.hankel_min_eig = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        std::vector<double> e(static_cast<size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) e[static_cast<size_t>(i)] = std::exp(-a[static_cast<size_t>(i)] * t);
        const int even_size = n / 2 + 1;
        const double eig_even = hankel_min_eig(e, even_size);
        std::vector<double> shifted(e.begin() + 1, e.end());
        const int shift_size = (n - 1) / 2 + 1;
        const double eig_shift = hankel_min_eig(shifted, shift_size);
        report.hankel_min_eig = std::min({report.hankel_min_eig, eig_even, eig_shift});
        if (eig_even < -1e-9) report.hankel_even_ok = false;
        if (eig_shift < -1e-9) report.hankel_shifted_ok = false;
    }

    // (c) the mixed-moment sequence E(X_tau X_{tau+t})^j must stay a moment sequence
    const int j_max = std::min({kMaxCoeffOrder, n, 8});
    const CoeffMatrix c = basis_from_moments(spec, j_max);
    const auto m = raw_moments(spec, 2 * j_max);
    report.bimom_min_eig = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        std::vector<double> b(static_cast<size_t>(j_max) + 1);
        for (int j = 0; j <= j_max; ++j) {
            double v = m[static_cast<size_t>(2 * j)];
            for (int i = 1; i <= j; ++i)
                v -= (1.0 - std::exp(-a[static_cast<size_t>(i)] * t)) * c.at(j, i) * c.at(j, i);
            b[static_cast<size_t>(j)] = v;
        }
        const double eig = hankel_min_eig(b, j_max / 2 + 1);
        report.bimom_min_eig = std::min(report.bimom_min_eig, eig);
        if (eig < -1e-9) report.bimom_ok = false;
    }

    // (d) tail-ratio proxy for sum_n e^{-2 alpha_n t}
    const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
    const double gap = a[static_cast<size_t>(n)] - a[static_cast<size_t>(n) - 1];
    report.tail_ratio = std::exp(-2.0 * gap * t_min);
    report.summable = report.tail_ratio < 1.0;
    return report;
}

DegenerateClassification classify_degenerate(const std::vector<double>& b) {
    if (b.empty() || std::abs(b[0] - 1.0) > 1e-12)
        throw validation_error("moment sequence must start with b_0 = 1");
    DegenerateClassification out;
    const int len = static_cast<int>(b.size());
    const auto close = [](double x, double y) {
        return std::abs(x - y) <= 1e-10 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    // i) b_{4m+2} = b_{2m+1}^2 -> one-point law
    for (int m = 0; 4 * m + 2 < len; ++m) {
        const double odd = b[static_cast<size_t>(2 * m + 1)];
        if (!close(b[static_cast<size_t>(4 * m + 2)], odd * odd)) continue;
        out.kind = DegenerateClassification::Kind::OnePoint;
        out.trigger_m = m;
        out.location = std::copysign(std::pow(std::abs(odd), 1.0 / (2 * m + 1)), odd);
        out.predicted.resize(b.size());
        double p = 1.0;
        for (size_t i = 0; i < b.size(); ++i, p *= out.location) out.predicted[i] = p;
        return out;
    }
    // ii) b_{4m} = b_{2m}^2 (m >= 1) -> two-point law at +-x0
    for (int m = 1; 4 * m < len; ++m) {
        const double even = b[static_cast<size_t>(2 * m)];
        if (even <= 0.0 || !close(b[static_cast<size_t>(4 * m)], even * even)) continue;
        const double x0 = std::pow(even, 1.0 / (2 * m));
        out.kind = DegenerateClassification::Kind::TwoPoint;
        out.trigger_m = m;
        out.location = x0;
        out.weight_p = len > 1 ? (b[1] + x0) / (2.0 * x0) : 0.5;
        out.predicted.resize(b.size());
        double xp = 1.0;
        for (size_t i = 0; i < b.size(); ++i, xp *= x0)
            out.predicted[i] = (i % 2 == 0) ? xp : xp * (2.0 * out.weight_p - 1.0);
        return out;
    }
    return out;
}

bool harness_detect(const ContinuityReport& report, const MarginalSpec& spec) {
    if (spec.support().bounded()) return false;
    return std::abs(report.continuity_coefficient - 2.0) <= 1e-9;
}

}  // namespace smpr

#pragma once

#include <optional>
#include <vector>

#include "smpr/marginals.hpp"
#include "smpr/orthopoly.hpp"

namespace smpr {

/// Named growth laws for the martingale rates; ratios are normalized so
/// rho_1 = 1 and alpha_n = alpha_1 * rho_n.
enum class RatioLaw { Linear, Quadratic, SemicircleLaw };

double ratio_law_value(RatioLaw law, int n);
std::string ratio_law_name(RatioLaw law);

/// The rate sequence {alpha_n}: either an explicit finite ratio list or a
/// named law extendable to any index. alpha_0 = 0 always.
class AlphaSequence {
public:
    static AlphaSequence from_ratios(std::vector<double> ratios, double scale = 1.0);
    static AlphaSequence from_law(RatioLaw law, double scale = 1.0);

    double scale() const { return scale_; }
    bool has_law() const { return law_.has_value(); }
    std::optional<RatioLaw> law() const { return law_; }

    /// Largest index with a defined ratio; unbounded for law-backed sequences.
    int max_index() const;

    double ratio(int n) const;
    double alpha(int n) const { return scale_ * ratio(n); }

    std::vector<double> ratios(int count) const;

    AlphaSequence rescaled(double new_scale) const;

private:
    double scale_ = 1.0;
    std::vector<double> ratios_;  // rho_1, rho_2, ... when explicit
    std::optional<RatioLaw> law_;
};

/// Exact-form increment moment E(X_{tau+t} - X_tau)^{2k} = sum_n D_n (1 - e^{-alpha_n t}).
struct IncrementExpansion {
    int k = 0;
    std::vector<double> coeffs;  // D_1 .. D_k

    double coeff(int n) const { return coeffs.at(static_cast<size_t>(n) - 1); }
    /// t -> infinity limit, sum_n D_n = E(X - Y)^{2k} for independent X, Y.
    double limit() const;
    double value(double t, const AlphaSequence& alpha) const;
    /// Coefficient of t^s in the expansion around t = 0.
    double taylor_coefficient(int s, const AlphaSequence& alpha) const;
    /// sum_n D_n rho_n^s with rho_1 = 1; the continuity conditions are
    /// rown_sum(s) = 0 for s = 1..r.
    double rown_sum(int s, const std::vector<double>& rho) const;
    /// Scale of the alternating sum, for relative residuals.
    double rown_scale(int s, const std::vector<double>& rho) const;
};

IncrementExpansion increment_expansion(const CoeffMatrix& c, int k);

struct ContinuityReport {
    double continuity_coefficient = 0.0;  // forced rho_2 at order 4
    int k = 0;
    std::vector<double> ratios;  // rho_1 .. rho_k of the selected root
    bool positive = false;       // all ratios > 0
    int order_r = 0;             // achieved vanishing order (k - 1 when verified)
    double hoelder_bound = 0.0;  // delta < r / (2k)
    double max_relative_residual = 0.0;
    int newton_iterations = 0;
    std::vector<std::vector<double>> other_roots;  // further positive roots found
};

/// C = (12 + 4 kappa - 3 s^2) / (6 + 3 kappa - 3 s^2); also evaluated in the
/// raw central-moment form (4 m4 m2 - 3 m3^2) / (3 (m4 m2 - m3^2 - m2^3)) and
/// cross-asserted. Throws numeric_error for two-point-like marginals where
/// the denominator vanishes.
double continuity_coefficient(const MomentSummary& summary);

/// Solves the order-s continuity conditions sum_n D_n rho_n^s = 0,
/// s = 1..k-1, for the ratios rho_2..rho_k by damped Newton iteration.
ContinuityReport solve_alpha(const CoeffMatrix& c, int k);

/// E(X_{tau+t}^j | X_tau = y) = sum_{n<=j} c_{j,n} e^{-alpha_n t} h_n(y).
double conditional_moment(const CoeffMatrix& c, const OrthoBasis& basis,
                          const AlphaSequence& alpha, int j, double y, double t);

struct AdmissibilityReport {
    int terms = 0;                 // alpha terms examined, alpha_1..alpha_terms
    bool concave = true;
    std::optional<int> concavity_violation_at;
    bool hankel_required = false;  // support unbounded
    bool hankel_even_ok = true;    // [e^{-alpha_{i+j} t}] nonnegative definite
    bool hankel_shifted_ok = true; // [e^{-alpha_{i+j+1} t}]
    double hankel_min_eig = 0.0;
    bool bimom_ok = true;          // mixed-moment sequence stays a moment sequence
    double bimom_min_eig = 0.0;
    bool summable = true;          // tail-ratio proxy for sum e^{-2 alpha_n t}
    double tail_ratio = 0.0;

    /// All required findings pass (finite checks: necessary, not sufficient).
    bool admissible() const;
};

AdmissibilityReport alpha_admissibility(const AlphaSequence& alpha, const MarginalSpec& spec,
                                        const std::vector<double>& t_grid, int n_terms = 8);

struct DegenerateClassification {
    enum class Kind { NonDegenerate, OnePoint, TwoPoint };
    Kind kind = Kind::NonDegenerate;
    int trigger_m = -1;
    double location = 0.0;  // atom (one-point) or +|atom| (two-point)
    double weight_p = 0.0;  // P(X = +location) for two-point laws
    std::vector<double> predicted;  // reconstructed sequence when degenerate
};

/// Detects one- and two-point moment sequences from b_{4m+2} = b_{2m+1}^2 or
/// b_{4m} = b_{2m}^2 (relative tolerance 1e-10), scanning m up to len/4.
DegenerateClassification classify_degenerate(const std::vector<double>& b);

/// True when the marginal support is unbounded and C = 2, which forces the
/// linear law alpha_n = n alpha_1.
bool harness_detect(const ContinuityReport& report, const MarginalSpec& spec);

}  // namespace smpr

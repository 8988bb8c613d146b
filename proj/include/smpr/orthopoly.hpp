#pragma once

#include <memory>
#include <vector>

#include "smpr/marginals.hpp"

namespace smpr {

/// Coefficient matrices need raw moments up to twice their order, so the
/// moment-route degree cap is half the marginal moment cap.
constexpr int kMaxCoeffOrder = kMaxMomentOrder / 2;

/// Hard cap on basis degree for the recurrence route (Lancaster series index).
constexpr int kMaxBasisDegree = 512;

enum class BasisRoute { Recurrence, Moments };

/// Exact LDL^T factorization of the Hankel moment matrix: M = L D L^T with
/// unit lower-triangular L and positive diagonal D, all rational. The
/// orthonormal-coefficient matrix is c_{j,n} = L[j][n] * sqrt(D[n]), and the
/// product of two same-column entries c_{j,n} c_{j',n} = L[j][n] L[j'][n] D[n]
/// stays rational, which downstream increment expansions exploit.
struct ExactLDL {
    int order = 0;
    std::vector<std::vector<Rational>> rows;  // unit lower triangle, row j has j+1 entries
    std::vector<Rational> diag;

    /// c_{j,n} * c_{jp,n}, exact.
    Rational coeff_product(int j, int jp, int n) const;
};

ExactLDL exact_ldl(const MarginalSpec& spec, int order);

/// Lower-triangular coefficients c[j][n] = E X^j h_n(X), 0 <= n <= j <= order.
class CoeffMatrix {
public:
    CoeffMatrix() = default;
    CoeffMatrix(int order, std::vector<double> lower, std::shared_ptr<const ExactLDL> exact);

    int order() const { return order_; }
    double at(int j, int n) const;
    const ExactLDL* exact() const { return exact_.get(); }

private:
    int order_ = -1;
    std::vector<double> lower_;  // row-major triangle
    std::shared_ptr<const ExactLDL> exact_;
};

/// Orthonormal polynomials h_n of a marginal, held as monic Jacobi
/// coefficients (a_n, b_n): p_{n+1} = (x - a_n) p_n - b_n p_{n-1} and
/// h_n = p_n / sqrt(b_1 ... b_n). The orthonormal three-term form is
/// h_{n+1} = (A_n x + B_n) h_n - C_n h_{n-1} with A_n = 1/sqrt(b_{n+1}),
/// B_n = -a_n A_n, C_n = sqrt(b_n / b_{n+1}).
class OrthoBasis {
public:
    OrthoBasis() = default;
    OrthoBasis(MarginalSpec spec, int degree, std::vector<double> a, std::vector<double> b,
               BasisRoute route);

    const MarginalSpec& spec() const { return *spec_; }
    int degree() const { return degree_; }
    BasisRoute route() const { return route_; }

    double jacobi_a(int n) const { return a_.at(static_cast<size_t>(n)); }
    double jacobi_b(int n) const { return b_.at(static_cast<size_t>(n)); }

    double A(int n) const { return 1.0 / sqrt_b_.at(static_cast<size_t>(n) + 1); }
    double B(int n) const { return -a_.at(static_cast<size_t>(n)) * A(n); }
    double C(int n) const { return sqrt_b_.at(static_cast<size_t>(n)) * A(n); }

    /// h_n(x) by forward recurrence; n must be in [0, degree].
    double eval(int n, double x) const;

    /// h_0..h_n at x in one sweep (series evaluations reuse this).
    void eval_all(int n, double x, std::vector<double>& out) const;

private:
    std::shared_ptr<const MarginalSpec> spec_;
    int degree_ = -1;
    std::vector<double> a_;       // a_0 .. a_{degree-1} (and one spare when available)
    std::vector<double> b_;       // b_0 = 0 sentinel, b_1 .. b_degree(+1)
    std::vector<double> sqrt_b_;  // cached square roots, sqrt_b_[0] = 1
    BasisRoute route_ = BasisRoute::Recurrence;
};

/// Basis from the family's named three-term recurrence. Laplace has no named
/// recurrence and is routed through the moment factorization (degree <= 12).
OrthoBasis basis_from_recurrence(const MarginalSpec& spec, int degree);

/// Coefficient matrix from the exact LDL^T of the moment matrix.
CoeffMatrix basis_from_moments(const MarginalSpec& spec, int degree);

/// Coefficient matrix from the closed-form expansion tables
/// (Gaussian, Arcsine, Semicircle only).
CoeffMatrix coeffs_from_expansion(const MarginalSpec& spec, int degree);

double eval_h(const OrthoBasis& basis, int n, double x);

}  // namespace smpr

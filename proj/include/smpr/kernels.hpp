#pragma once

#include <vector>

#include <Eigen/Dense>

#include "smpr/continuity.hpp"
#include "smpr/marginals.hpp"
#include "smpr/orthopoly.hpp"
#include "smpr/special_functions.hpp"

namespace smpr {

struct TruncationPolicy {
    int max_terms = 512;     // hard cap on the Lancaster series index
    double tail_tol = 1e-9;  // bound e^{-alpha_N t} max|h_N|^2 must drop below this
};

struct SeriesPlan {
    int terms = 0;       // series truncated after index `terms`
    double bound = 0.0;  // achieved tail bound
    bool ok = false;
};

enum class KernelMode { Series, ClosedForm };

/// An SMPR model (marginal, orthonormal basis, rates, truncation policy),
/// evaluable as a truncated Lancaster series or through the matching closed
/// form when the (family, rate-law) pair has one.
class TransitionKernel {
public:
    TransitionKernel(MarginalSpec spec, AlphaSequence alpha, TruncationPolicy trunc = {},
                     KernelMode mode = KernelMode::Series);

    const MarginalSpec& spec() const { return spec_; }
    const OrthoBasis& basis() const { return basis_; }
    const AlphaSequence& alpha() const { return alpha_; }
    const TruncationPolicy& truncation() const { return trunc_; }
    KernelMode mode() const { return mode_; }

    /// Mehler for Gaussian/linear, Hardy-Hille for Gamma/linear, theta forms
    /// for arcsine/n^2 and semicircle/n(n+2)/3.
    bool closed_form_available() const;

    /// Truncation index for evaluations at the given points.
    SeriesPlan plan(double t, const std::vector<double>& xs, const std::vector<double>& ys) const;

    /// Kernel ratio d eta / d mu (x | y, t) = sum_n e^{-alpha_n t} h_n(x) h_n(y).
    double ratio(double x, double y, double t) const;

    /// Transition density eta(x | y, t) = density(x) * ratio.
    double transition_density(double x, double y, double t) const;

    /// Ratio on a full grid, one series plan for the whole grid.
    Eigen::MatrixXd ratio_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                               double t) const;

private:
    double ratio_series(double x, double y, double t, const SeriesPlan& plan) const;
    double ratio_closed(double x, double y, double t) const;

    MarginalSpec spec_;
    AlphaSequence alpha_;
    TruncationPolicy trunc_;
    KernelMode mode_;
    OrthoBasis basis_;
};

/// Stationary bivariate Gaussian density with rho = e^{-alpha1 t}.
double mehler_closed(double x, double y, double t, double alpha1);

/// Bivariate density of the Gamma(beta) model with linear rates: the
/// Laguerre Lancaster sum in closed form via the modified Bessel function.
double hardy_hille(double x, double y, double t, double alpha1, double beta);

/// Arcsine transition density via theta functions with half-angle arguments,
/// rates alpha_n = alpha1 n^2.
double arcsine_kernel(double x, double y, double t, double alpha1);

/// Semicircle (radius 1) transition density via a theta difference; `alpha`
/// follows the n(n+2) convention: rates are alpha n(n+2), nome e^{-alpha t}.
double semicircle_kernel(double x, double y, double t, double alpha);

struct PositivityReport {
    double min_value = 0.0;
    double at_x = 0.0, at_y = 0.0, at_t = 0.0;
    bool admissible_at_resolution = false;  // min >= -(series tolerance)
};

/// Minimum of the Lancaster ratio over grid x grid x t_list with location;
/// rows scan in parallel with a fixed reduction order.
PositivityReport positivity_scan(const TransitionKernel& kernel, int grid_n,
                                 const std::vector<double>& t_list);

/// |integral eta(x|z,s) eta(z|y,t) dz - eta(x|y,s+t)| by Gauss quadrature.
double chapman_kolmogorov_check(const TransitionKernel& kernel, double s, double t, double x,
                                double y, int nodes = 64);

/// |E(h_n(X_{t+tau}) | X_tau = y) - e^{-alpha_n t} h_n(y)| by Gauss quadrature.
double martingale_check(const TransitionKernel& kernel, int n, double y, double t,
                        int nodes = 64);

/// Plot/scan range: exact support for bounded marginals, a 1e-4 two-sided
/// tail range otherwise.
Support scan_range(const MarginalSpec& spec);

}  // namespace smpr
